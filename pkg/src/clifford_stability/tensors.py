"""Symmetric 2-tensor calculus on the flat torus ``R^2 / (2 pi r Z x 2 pi s Z)``.

Fields are finite Fourier series stored as ``numpy.fft.fft2`` coefficient
arrays, normalized so that ``f(u, v) = sum c[k, l] exp(i (k u / r + l v / s))``.
Derivatives are diagonal multipliers; pointwise products go through the
sample grid, so callers pick a grid wide enough for the frequencies involved
(``n > 2 * (k1 + k2)`` per direction for a product of two fields).

Index 0 is the ``u`` direction (period ``2 pi r``), index 1 the ``v``
direction (period ``2 pi s``). Tensors use the pairing
``<q, p> = sum_ij q_ij p_ij`` without a factor 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .torus import TorusParameter

__all__ = [
    "FlatMetric",
    "FourierField",
    "OneFormField",
    "SymTensorField",
    "c_constant",
    "d_divergence",
    "d_trace",
    "divergence",
    "trace",
    "tt_perturbation",
]

_TRACE_TOL = 1e-12


class FourierField:
    """Real scalar field on the flat torus, held by its Fourier coefficients."""

    __slots__ = ("T", "coef")

    def __init__(self, T: TorusParameter, coef):
        coef = np.asarray(coef, dtype=complex)
        if coef.ndim != 2:
            raise ValueError("coefficient array must be two-dimensional")
        self.T = T
        self.coef = coef
        self.coef.setflags(write=False)

    # construction -------------------------------------------------------

    @classmethod
    def from_values(cls, T, values):
        values = np.asarray(values, dtype=float)
        return cls(T, np.fft.fft2(values) / values.size)

    @classmethod
    def zeros(cls, T, shape=(32, 32)):
        return cls(T, np.zeros(shape, dtype=complex))

    @classmethod
    def constant(cls, T, value, shape=(32, 32)):
        c = np.zeros(shape, dtype=complex)
        c[0, 0] = value
        return cls(T, c)

    @classmethod
    def mode(cls, T, k, l, parity_u="cos", parity_v="cos", shape=(32, 32)):
        """Basis function ``u(k x / r) v(l y / s)`` with ``u, v`` in {cos, sin}."""
        u, v = grid(T, shape)
        return cls.from_values(T, _trig(parity_u, k, u / T.r) * _trig(parity_v, l, v / T.s))

    @classmethod
    def random(cls, T, kmax, rng, shape=(32, 32), amplitude=1.0):
        """Random real field supported on frequencies ``|k|, |l| <= kmax``."""
        n1, n2 = shape
        if 2 * kmax >= min(n1, n2):
            raise ValueError("grid too small for requested band")
        c = np.zeros(shape, dtype=complex)
        band = np.arange(-kmax, kmax + 1)
        c[np.ix_(band, band)] = rng.normal(size=(band.size, band.size))
        vals = np.real(np.fft.ifft2(c)) * c.size
        vals *= amplitude / max(np.abs(vals).max(), 1e-300)
        return cls.from_values(T, vals)

    # access -------------------------------------------------------------

    @property
    def shape(self):
        return self.coef.shape

    def values(self) -> np.ndarray:
        return np.real(np.fft.ifft2(self.coef)) * self.coef.size

    def wavenumbers(self):
        """Physical wavenumbers ``(k / r, l / s)`` broadcast to the grid."""
        n1, n2 = self.shape
        k = np.fft.fftfreq(n1, 1.0 / n1)[:, None] / self.T.r
        l = np.fft.fftfreq(n2, 1.0 / n2)[None, :] / self.T.s
        return k, l

    def derivative(self, axis: int, order: int = 1) -> "FourierField":
        k, l = self.wavenumbers()
        w = k if axis == 0 else l
        mult = (1j * w) ** order
        c = self.coef * mult
        if order % 2:
            c = _kill_nyquist(c, axis)
        return FourierField(self.T, c)

    def mean(self) -> float:
        return float(self.coef[0, 0].real)

    def integral(self) -> float:
        return self.mean() * self.T.area

    def inner(self, other: "FourierField") -> float:
        """L^2 pairing over the torus."""
        return (self * other).integral()

    def max_abs_coef(self) -> float:
        return float(np.abs(self.coef).max())

    # arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.shape != other.shape or self.T != other.T:
            raise ValueError("fields live on different grids or tori")

    def __add__(self, other):
        if isinstance(other, FourierField):
            self._check(other)
            return FourierField(self.T, self.coef + other.coef)
        c = self.coef.copy()
        c[0, 0] += other
        return FourierField(self.T, c)

    __radd__ = __add__

    def __neg__(self):
        return FourierField(self.T, -self.coef)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FourierField):
            self._check(other)
            return FourierField.from_values(self.T, self.values() * other.values())
        return FourierField(self.T, self.coef * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FourierField):
            self._check(other)
            return FourierField.from_values(self.T, self.values() / other.values())
        return FourierField(self.T, self.coef / other)

    def __repr__(self):
        return f"FourierField(r={self.T.r:.6g}, shape={self.shape})"


def grid(T: TorusParameter, shape=(32, 32)):
    """Sample points ``(u, v)`` of the flat torus as broadcastable arrays."""
    n1, n2 = shape
    u = 2.0 * math.pi * T.r * np.arange(n1)[:, None] / n1
    v = 2.0 * math.pi * T.s * np.arange(n2)[None, :] / n2
    return u, v


def _trig(parity, k, x):
    if parity == "cos":
        return np.cos(k * x)
    if parity == "sin":
        if k == 0:
            raise ValueError("sin parity is not allowed at frequency 0")
        return np.sin(k * x)
    raise ValueError(f"unknown parity {parity!r}")


def _kill_nyquist(c, axis):
    # odd derivatives of the Nyquist mode are not real-representable
    n = c.shape[axis]
    if n % 2 == 0:
        c = c.copy()
        if axis == 0:
            c[n // 2, :] = 0.0
        else:
            c[:, n // 2] = 0.0
    return c


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric covariant 2-tensor with Fourier components ``t11, t12, t22``."""

    t11: FourierField
    t12: FourierField
    t22: FourierField

    @property
    def T(self):
        return self.t11.T

    @property
    def shape(self):
        return self.t11.shape

    def comp(self, i: int, j: int) -> FourierField:
        if i == j:
            return self.t11 if i == 0 else self.t22
        return self.t12

    @classmethod
    def from_matrix(cls, T, matrix, shape=(32, 32)):
        (a, b), (c, d) = matrix
        if b != c:
            raise ValueError("matrix must be symmetric")
        f = FourierField.constant
        return cls(f(T, a, shape), f(T, b, shape), f(T, d, shape))

    @classmethod
    def q1(cls, T, shape=(32, 32)):
        """``du dv + dv du``."""
        return cls.from_matrix(T, ((0.0, 1.0), (1.0, 0.0)), shape)

    @classmethod
    def q2(cls, T, shape=(32, 32)):
        """``dv dv - du du``."""
        return cls.from_matrix(T, ((-1.0, 0.0), (0.0, 1.0)), shape)

    @classmethod
    def euclidean(cls, T, shape=(32, 32)):
        return cls.from_matrix(T, ((1.0, 0.0), (0.0, 1.0)), shape)

    @classmethod
    def tracefree(cls, a1: FourierField, a2: FourierField):
        """``a1 q^1 + a2 q^2``."""
        return cls(-a2, a1, a2)

    def tt_coefficients(self):
        """Coefficients ``(a1, a2)`` of ``q^1, q^2`` in the tracefree part."""
        return self.t12, 0.5 * (self.t22 - self.t11)

    def is_tracefree(self, tol=_TRACE_TOL) -> bool:
        scale = max(self.t11.max_abs_coef(), self.t22.max_abs_coef(), 1.0)
        return (self.t11 + self.t22).max_abs_coef() <= tol * scale

    def __add__(self, other):
        return SymTensorField(self.t11 + other.t11, self.t12 + other.t12, self.t22 + other.t22)

    def __sub__(self, other):
        return SymTensorField(self.t11 - other.t11, self.t12 - other.t12, self.t22 - other.t22)

    def __mul__(self, a):
        # scalar or scalar field
        return SymTensorField(self.t11 * a, self.t12 * a, self.t22 * a)

    __rmul__ = __mul__

    def inner(self, other: "SymTensorField") -> float:
        """L^2 pairing ``int q_ij p_ij`` over the flat torus."""
        return (
            self.t11.inner(other.t11)
            + 2.0 * self.t12.inner(other.t12)
            + self.t22.inner(other.t22)
        )


@dataclass(frozen=True)
class OneFormField:
    c1: FourierField
    c2: FourierField

    def comp(self, m: int) -> FourierField:
        return self.c1 if m == 0 else self.c2

    def __add__(self, other):
        return OneFormField(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return OneFormField(self.c1 - other.c1, self.c2 - other.c2)

    def __mul__(self, a):
        return OneFormField(self.c1 * a, self.c2 * a)

    __rmul__ = __mul__

    def max_abs_coef(self) -> float:
        return max(self.c1.max_abs_coef(), self.c2.max_abs_coef())


@dataclass(frozen=True)
class FlatMetric:
    """Constant-coefficient metric ``g11 du^2 + 2 g12 du dv + g22 dv^2``."""

    g11: float = 1.0
    g12: float = 0.0
    g22: float = 1.0

    def __post_init__(self):
        if not (self.g11 > 0.0 and self.det > 0.0):
            raise ValueError(f"metric is not positive definite: {self}")

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12

    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    def inverse(self) -> np.ndarray:
        return np.array([[self.g22, -self.g12], [-self.g12, self.g11]]) / self.det

    @property
    def is_euclidean(self) -> bool:
        return self.g11 == 1.0 and self.g12 == 0.0 and self.g22 == 1.0

    @classmethod
    def teichmueller(cls, T: TorusParameter, a: float, b: float) -> "FlatMetric":
        """Chart metric ``du^2 + 2 a (r/s) du dv + (a^2 + b^2)(r/s)^2 dv^2``.

        Equals the flat metric at ``a = 0, b = s / r``.
        """
        if b <= 0:
            raise ValueError("b must be positive")
        k = T.r / T.s
        return cls(1.0, a * k, (a * a + b * b) * k * k)


# ---------------------------------------------------------------------------
# metric handling for constant and field-valued metrics


def _metric_arrays(g, q: SymTensorField):
    """Pointwise metric and inverse as nested lists of arrays (or floats)."""
    if isinstance(g, FlatMetric):
        return g.matrix().tolist(), g.inverse().tolist(), None
    if isinstance(g, SymTensorField):
        v11, v12, v22 = g.t11.values(), g.t12.values(), g.t22.values()
        det = v11 * v22 - v12 * v12
        if np.any(v11 <= 0) or np.any(det <= 0):
            raise ValueError("metric field is not positive definite")
        gm = [[v11, v12], [v12, v22]]
        gi = [[v22 / det, -v12 / det], [-v12 / det, v11 / det]]
        return gm, gi, g
    raise TypeError(f"unsupported metric type {type(g).__name__}")


def _christoffel(g: SymTensorField, ginv):
    """Gamma^k_ij on the grid for a field-valued metric."""
    dg = [[[g.comp(i, j).derivative(m).values() for m in range(2)] for j in range(2)] for i in range(2)]
    gam = [[[0.0] * 2 for _ in range(2)] for _ in range(2)]
    for k in range(2):
        for i in range(2):
            for j in range(2):
                acc = 0.0
                for l in range(2):
                    acc = acc + 0.5 * ginv[k][l] * (dg[j][l][i] + dg[i][l][j] - dg[i][j][l])
                gam[k][i][j] = acc
    return gam


def trace(g, q: SymTensorField) -> FourierField:
    """``g^{ij} q_ij`` for a constant metric or a metric field."""
    _, gi, _ = _metric_arrays(g, q)
    vals = sum(gi[i][j] * q.comp(i, j).values() for i in range(2) for j in range(2))
    return FourierField.from_values(q.T, vals * np.ones(q.shape))


def divergence(g, q: SymTensorField) -> OneFormField:
    """``(div_g q)_m = g^{ij} (nabla_i q)_{jm}``.

    For a constant metric this is ``g^{ij} d_i q_jm``, diagonal in Fourier
    space. A :class:`SymTensorField` metric adds the Christoffel terms.
    """
    if isinstance(g, FlatMetric):
        gi = g.inverse()
        out = []
        for m in range(2):
            acc = FourierField.zeros(q.T, q.shape)
            for i in range(2):
                for j in range(2):
                    if gi[i, j] != 0.0:
                        acc = acc + gi[i, j] * q.comp(j, m).derivative(i)
            out.append(acc)
        return OneFormField(*out)

    _, gi, gfield = _metric_arrays(g, q)
    gam = _christoffel(gfield, gi)
    qv = [[q.comp(i, j).values() for j in range(2)] for i in range(2)]
    dq = [[[q.comp(i, j).derivative(m).values() for m in range(2)] for j in range(2)] for i in range(2)]
    out = []
    for m in range(2):
        acc = 0.0
        for i in range(2):
            for j in range(2):
                cov = dq[j][m][i]
                for k in range(2):
                    cov = cov - gam[k][i][j] * qv[k][m] - gam[k][i][m] * qv[j][k]
                acc = acc + gi[i][j] * cov
        out.append(FourierField.from_values(q.T, acc))
    return OneFormField(*out)


def d_trace(g, q: SymTensorField, h: SymTensorField) -> FourierField:
    """Metric derivative of the trace: ``-g^{ij} g^{kl} q_ik h_jl``."""
    gi = g.inverse()
    acc = FourierField.zeros(q.T, q.shape)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    w = gi[i, j] * gi[k, l]
                    if w != 0.0:
                        acc = acc - w * (q.comp(i, k) * h.comp(j, l))
    return acc


def d_divergence(g, q: SymTensorField, h: SymTensorField) -> OneFormField:
    """Metric derivative of the divergence at the euclidean metric.

    Returns the four-term expression
    ``-h_ij d_j q_im - (div h)_k q_km + 1/2 d_k(tr h) q_km - 1/2 (d_m h_ik) q_ik``
    (all indices raised with the identity). Christoffel symbols vanish at the
    base metric, so covariant derivatives reduce to partial ones.
    """
    if not (isinstance(g, FlatMetric) and g.is_euclidean):
        raise ValueError("d_divergence is only available at the euclidean metric")
    divh = divergence(g, h)
    trh = h.t11 + h.t22
    out = []
    for m in range(2):
        acc = FourierField.zeros(q.T, q.shape)
        for i in range(2):
            for j in range(2):
                acc = acc - h.comp(i, j) * q.comp(i, m).derivative(j)
        for k in range(2):
            acc = acc - divh.comp(k) * q.comp(k, m)
            acc = acc + 0.5 * (trh.derivative(k) * q.comp(k, m))
        for i in range(2):
            for k in range(2):
                acc = acc - 0.5 * (h.comp(i, k).derivative(m) * q.comp(i, k))
        out.append(acc)
    return OneFormField(*out)


def _inverse_laplacian(f: FourierField) -> FourierField:
    """Zero-mean solution of ``Delta u = f``; ``f`` must have zero mean."""
    scale = max(f.max_abs_coef(), 1.0)
    if abs(f.coef[0, 0]) > 1e-12 * scale:
        raise ValueError("Poisson right-hand side has a nonzero mean")
    k, l = f.wavenumbers()
    m = k * k + l * l
    m[0, 0] = 1.0
    c = -f.coef / m
    c[0, 0] = 0.0
    return FourierField(f.T, c)


def tt_perturbation(alpha: SymTensorField, mu: int = 2) -> SymTensorField:
    """Tracefree first-order change ``eta°`` of the TT tensor ``q^mu``.

    Moving the flat metric in the tracefree direction ``alpha``, the TT
    tensor ``q^mu`` deforms with tracefree velocity ``eta° = u1 q^1 + u2 q^2``
    determined by ``div eta° = (div alpha)_k q^mu_kl``. Combining the two
    first-order equations gives the Poisson problems

        Delta u1 = d_2 R_1 + d_1 R_2,    Delta u2 = d_2 R_2 - d_1 R_1,

    with ``R`` the right-hand side one-form; for ``mu = 2`` and
    ``alpha = a1 q^1 + a2 q^2`` these read
    ``Delta u1 = (d_1^2 - d_2^2) a1 + 2 d_12 a2`` and
    ``Delta u2 = 2 d_12 a1 - (d_1^2 - d_2^2) a2``. The zero modes of
    ``u1, u2`` are set to zero, which makes ``eta°`` orthogonal to ``q^1, q^2``.
    """
    if not alpha.is_tracefree():
        raise ValueError("alpha must be tracefree")
    T, shape = alpha.T, alpha.shape
    qmu = SymTensorField.q1(T, shape) if mu == 1 else SymTensorField.q2(T, shape) if mu == 2 else None
    if qmu is None:
        raise ValueError("mu must be 1 or 2")
    R = _contract_oneform(divergence(FlatMetric(), alpha), qmu)
    u1 = _inverse_laplacian(R.c1.derivative(1) + R.c2.derivative(0))
    u2 = _inverse_laplacian(R.c2.derivative(1) - R.c1.derivative(0))
    return SymTensorField.tracefree(u1, u2)


def _contract_oneform(w: OneFormField, q: SymTensorField) -> OneFormField:
    # (w_k q_kl)_l with constant q
    out = []
    for l in range(2):
        acc = FourierField.zeros(q.T, q.shape)
        for k in range(2):
            qkl = q.comp(k, l).mean()
            if qkl != 0.0:
                acc = acc + qkl * w.comp(k)
        out.append(acc)
    return OneFormField(*out)


def c_constant(T: TorusParameter, k: int, l: int) -> float:
    """``(k^2 s^2 - l^2 r^2) / (k^2 s^2 + l^2 r^2)`` for ``(k, l) != (0, 0)``."""
    if k == 0 and l == 0:
        raise ValueError("c_constant is undefined for the (0, 0) mode")
    a = k * k * T.s * T.s
    b = l * l * T.r * T.r
    return (a - b) / (a + b)
