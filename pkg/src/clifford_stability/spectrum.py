"""Constrained stability spectrum of the Clifford tori as Fourier multipliers.

Normal variations ``phi n`` with ``phi`` in the mode space ``A_{k,l}``
(products of ``cos``/``sin`` of ``k u / r`` and ``l v / s``) diagonalize every
operator here. For such a mode, with ``m = k^2/r^2 + l^2/s^2``:

* ``lw``  is the symbol of the second variation of the Willmore energy,
* ``lb``  the symbol of the second variation of the Teichmueller coordinate b,
* ``lam`` the Lagrange multiplier of the b-constraint,
* ``hessian = lw - lam * lb`` the symbol of the constrained stability operator,
* ``e`` the factored closed form ``N / (r^4 s^4 (k^2 s^2 + l^2 r^2))``.

``e`` equals ``2 * hessian`` identically: the factored expression expands the
operator bracket without its leading one half. Signs, zeros and Morse
indices are unaffected; magnitudes of second variations follow ``hessian``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .tensors import FourierField
from .torus import TorusParameter, make_torus, s_squared

__all__ = [
    "ModeIndex",
    "SpectrumEntry",
    "StabilityReport",
    "Threshold",
    "apply_operator",
    "eigenvalue",
    "lagrange_multiplier",
    "lb_symbol",
    "lw_symbol",
    "morse_index",
    "morse_index_grid",
    "spectrum_table",
    "thresholds",
]

_PARITIES = ("cos", "sin")


@dataclass(frozen=True, order=True)
class ModeIndex:
    k: int
    l: int
    parity_u: str = "cos"
    parity_v: str = "cos"

    def __post_init__(self):
        if self.k < 0 or self.l < 0:
            raise ValueError("mode frequencies must be nonnegative")
        for freq, parity in ((self.k, self.parity_u), (self.l, self.parity_v)):
            if parity not in _PARITIES:
                raise ValueError(f"unknown parity {parity!r}")
            if freq == 0 and parity == "sin":
                raise ValueError("sin parity is not allowed at frequency 0")

    @property
    def multiplicity(self) -> int:
        """Number of real basis functions sharing the frequencies ``(k, l)``."""
        return (2 if self.k > 0 else 1) * (2 if self.l > 0 else 1)

    def basis(self) -> list["ModeIndex"]:
        pu = ("cos", "sin") if self.k > 0 else ("cos",)
        pv = ("cos", "sin") if self.l > 0 else ("cos",)
        return [ModeIndex(self.k, self.l, a, b) for a in pu for b in pv]


def _check_mode(k, l):
    if k == 0 and l == 0:
        raise ValueError("the (0, 0) mode is not tangent to the constraint set")


def _squares(T):
    r2 = T.r * T.r
    return r2, s_squared(T.r)


def lagrange_multiplier(T: TorusParameter) -> float:
    """``-pi^2 (r^2 - s^2) / s^2``; zero for the minimal Clifford torus."""
    r2, s2 = _squares(T)
    return -math.pi**2 * (r2 - s2) / s2 + 0.0


def lw_symbol(T: TorusParameter, mode) -> float:
    k, l = _kl(mode)
    _check_mode(k, l)
    return float(_lw(T.r, k, l))


def lb_symbol(T: TorusParameter, mode) -> float:
    k, l = _kl(mode)
    _check_mode(k, l)
    return float(_lb(T.r, k, l))


def _kl(mode):
    if isinstance(mode, ModeIndex):
        return mode.k, mode.l
    k, l = mode
    return int(k), int(l)


# vectorized symbol kernels; k, l may be arrays --------------------------------


def _lw(r, k, l):
    r2 = r * r
    s2 = s_squared(r)
    k2, l2 = np.square(k), np.square(l)
    m = k2 / r2 + l2 / s2
    return (
        0.5 * (m * m - m / (2.0 * r2 * s2))
        - k2 / (r2 * r2)
        - l2 / (s2 * s2)
        + (r2 * r2 + s2 * s2) / (2.0 * r2 * r2 * s2 * s2)
    )


def _c(r, k, l):
    r2 = r * r
    s2 = s_squared(r)
    a = np.square(k) * s2
    b = np.square(l) * r2
    return (a - b) / (a + b)


def _lb(r, k, l):
    r2 = r * r
    s2 = s_squared(r)
    k2, l2 = np.square(k), np.square(l)
    inner = k2 / r2 - l2 / s2 + (r2 - s2 + _c(r, k, l)) / (r2 * s2)
    return -inner / (4.0 * math.pi**2 * r2)


def _factors(r, k, l):
    """Prefactor ``P >= 0``, sign factor ``F`` and denominator of ``E``."""
    r2 = r * r
    s2 = s_squared(r)
    k2, l2 = np.square(k), np.square(l)
    pre = (k2 * k2 - k2) * s2 * s2 + (l2 * l2 - l2) * r2 * r2 + 2.0 * k2 * l2 * r2 * s2
    # k^2 s^2 + l^2 r^2 - 1 rewritten without s^2: exact zero at (1,0), (0,1), (1,1)
    sign_factor = (k2 - 1.0) + (l2 - k2) * r2
    denom = r2 * r2 * s2 * s2 * (k2 * s2 + l2 * r2)
    return pre, sign_factor, denom


def _e(r, k, l):
    pre, f, den = _factors(r, k, l)
    return pre * f / den


@dataclass(frozen=True)
class SpectrumEntry:
    """All multipliers of one Fourier mode at one radius."""

    r: float
    mode: ModeIndex
    c: float
    laplace_symbol: float
    lw: float
    lb: float
    lam: float
    big_n: float
    e: float
    sign: str

    @property
    def hessian(self) -> float:
        """Symbol of ``L^W - lam L^B``; the second variation per unit L^2 norm."""
        return self.lw - self.lam * self.lb

    @property
    def multiplicity(self) -> int:
        return self.mode.multiplicity

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "k": self.mode.k,
            "l": self.mode.l,
            "multiplicity": self.multiplicity,
            "c": self.c,
            "laplace_symbol": self.laplace_symbol,
            "lw": self.lw,
            "lb": self.lb,
            "lambda": self.lam,
            "N": self.big_n,
            "E": self.e,
            "hessian": self.hessian,
            "sign": self.sign,
        }


_EPS = np.finfo(float).eps


def _sign_tolerance(r, k, l):
    # |F| this small is rounding in r itself (e.g. r = fl(1/7) for the (0, 7)
    # mode); such modes sit on a threshold and count as zero
    k2, l2 = np.square(k), np.square(l)
    return 8.0 * _EPS * np.maximum(np.maximum(k2, l2 * r * r), 1.0)


def _sign_label(pre, f, zero_tol=0.0):
    if pre == 0.0 or abs(f) <= zero_tol:
        return "zero"
    return "negative" if f < 0 else "positive"


def eigenvalue(T: TorusParameter, mode) -> SpectrumEntry:
    k, l = _kl(mode)
    _check_mode(k, l)
    if not isinstance(mode, ModeIndex):
        mode = ModeIndex(k, l)
    r = T.r
    r2, s2 = _squares(T)
    pre, f, den = _factors(r, k, l)
    big_n = pre * f
    return SpectrumEntry(
        r=r,
        mode=mode,
        c=float(_c(r, k, l)),
        laplace_symbol=k * k / r2 + l * l / s2,
        lw=float(_lw(r, k, l)),
        lb=float(_lb(r, k, l)),
        lam=lagrange_multiplier(T),
        big_n=float(big_n),
        e=float(big_n / den) + 0.0,
        sign=_sign_label(pre, f, float(_sign_tolerance(r, k, l))),
    )


def spectrum_table(T: TorusParameter, kmax: int, lmax: int) -> list[SpectrumEntry]:
    """Entries for all ``0 <= k <= kmax, 0 <= l <= lmax`` except ``(0, 0)``."""
    return [
        eigenvalue(T, ModeIndex(k, l))
        for k in range(kmax + 1)
        for l in range(lmax + 1)
        if (k, l) != (0, 0)
    ]


@dataclass
class StabilityReport:
    r: float
    stable: bool
    negative_modes: list = field(default_factory=list)  # (ModeIndex, e, multiplicity)
    zero_modes: list = field(default_factory=list)
    morse_index: int = 0
    morse_index_weighted: int = 0

    @property
    def b(self) -> float:
        return make_torus(self.r).b

    def witnesses(self) -> list[tuple[int, int]]:
        return [(m.k, m.l) for m, _, _ in self.negative_modes]

    def to_dict(self) -> dict:
        pack = lambda rows: [
            {"k": m.k, "l": m.l, "E": e, "multiplicity": mult} for m, e, mult in rows
        ]
        return {
            "r": self.r,
            "b": self.b,
            "stable": self.stable,
            "morse_index": self.morse_index,
            "morse_index_weighted": self.morse_index_weighted,
            "negative_modes": pack(self.negative_modes),
            "zero_modes": pack(self.zero_modes),
        }


def _candidate_modes(T: TorusParameter) -> Iterable[tuple[int, int]]:
    # modes with k,l >= 1 have k^2 s^2 + l^2 r^2 >= 1, so only the axes can
    # go negative; enumerate k < 1/s and l < 1/r plus one mode past each edge
    # to catch threshold zeros
    kcap = int(math.floor(1.0 / T.s)) + 1
    lcap = int(math.floor(1.0 / T.r)) + 1
    yield (1, 1)
    for k in range(1, kcap + 1):
        yield (k, 0)
    for l in range(1, lcap + 1):
        yield (0, l)


def morse_index(T: TorusParameter) -> StabilityReport:
    """Exact count of negative modes of the constrained stability form."""
    neg, zero = [], []
    for k, l in _candidate_modes(T):
        entry = eigenvalue(T, ModeIndex(k, l))
        row = (entry.mode, entry.e, entry.multiplicity)
        if entry.sign == "negative":
            neg.append(row)
        elif entry.sign == "zero":
            zero.append(row)
    neg.sort(key=lambda row: (row[0].k, row[0].l))
    zero.sort(key=lambda row: (row[0].k, row[0].l))
    return StabilityReport(
        r=T.r,
        stable=not neg,
        negative_modes=neg,
        zero_modes=zero,
        morse_index=len(neg),
        morse_index_weighted=sum(mult for _, _, mult in neg),
    )


def _count_negative(r, family, guess):
    """Number of ``j >= 2`` with negative sign factor, one family at a time.

    The sign factor is increasing in ``j``, so the count is ``J - 1`` for the
    largest ``J`` with ``F(J) < -tol``; ``guess`` is refined by unit steps.
    """
    zero = np.zeros_like(r)

    def negative(j):
        if family == "l":
            f = _factors(r, zero, j)[1]
            return f < -_sign_tolerance(r, zero, j)
        f = _factors(r, j, zero)[1]
        return f < -_sign_tolerance(r, j, zero)

    j = np.maximum(guess, 1.0)
    for _ in range(3):
        j = np.where(negative(j + 1.0), j + 1.0, j)
    for _ in range(3):
        j = np.where((j > 1.0) & ~negative(j), j - 1.0, j)
    return np.maximum(j - 1.0, 0.0).astype(int)


def morse_index_grid(radii) -> np.ndarray:
    """Distinct-mode Morse index for an array of radii, vectorized.

    Counts ``(0, l)`` with ``l >= 2, l r < 1`` and ``(k, 0)`` with
    ``k >= 2, k s < 1`` using the same sign factor and zero tolerance as
    :func:`eigenvalue`.
    """
    r = np.asarray(radii, dtype=float)
    if np.any((r <= 0) | (r >= 1)):
        raise ValueError("radii must lie in (0, 1)")
    s = np.sqrt(s_squared(r))
    return _count_negative(r, "l", np.floor(1.0 / r)) + _count_negative(r, "k", np.floor(1.0 / s))


@dataclass(frozen=True)
class Threshold:
    family: str  # "l" for (0, l) modes, "k" for (k, 0) modes
    index: int
    r_exact: float
    r_root: float

    @property
    def mode(self) -> ModeIndex:
        return ModeIndex(0, self.index) if self.family == "l" else ModeIndex(self.index, 0)


def thresholds(max_k: int, xtol: float = 1e-15) -> list[Threshold]:
    """Radii where ``(0, l)`` and ``(k, 0)`` modes change sign, for 2..max_k.

    Each closed-form radius (``1/l`` resp. ``sqrt(k^2 - 1)/k``) is confirmed
    by a bracketed root search on the eigenvalue as a function of ``r``.
    """
    if max_k < 2:
        raise ValueError("max_k must be at least 2")
    out = []
    for l in range(2, max_k + 1):
        lo, hi = 1.0 / (l + 0.5), min(1.0 / (l - 0.5), 0.99)
        root = brentq(lambda r: _e(r, 0, l), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        out.append(Threshold("l", l, 1.0 / l, root))
    for k in range(2, max_k + 1):
        lo = math.sqrt(1.0 - 1.0 / (k - 0.5) ** 2)
        hi = math.sqrt(1.0 - 1.0 / (k + 0.5) ** 2)
        root = brentq(lambda r: _e(r, k, 0), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        out.append(Threshold("k", k, math.sqrt(k * k - 1.0) / k, root))
    return out


def apply_operator(T: TorusParameter, field_: FourierField, which: str = "full") -> FourierField:
    """Apply ``L^W`` (``"W"``), ``L^B`` (``"B"``) or ``L^W - lam L^B`` (``"full"``).

    ``field_`` is the coefficient of a normal field ``phi n`` and must have no
    constant component.
    """
    if which not in ("W", "B", "full"):
        raise ValueError(f"unknown operator {which!r}")
    scale = max(field_.max_abs_coef(), 1.0)
    if abs(field_.coef[0, 0]) > 1e-13 * scale:
        raise ValueError("normal field has a (0, 0) component")
    n1, n2 = field_.shape
    k = np.abs(np.fft.fftfreq(n1, 1.0 / n1))[:, None]
    l = np.abs(np.fft.fftfreq(n2, 1.0 / n2))[None, :]
    k, l = np.broadcast_arrays(k, l)
    mask = (k == 0) & (l == 0)
    ks, ls = np.where(mask, 1.0, k), np.where(mask, 0.0, l)
    if which == "W":
        sym = _lw(T.r, ks, ls)
    elif which == "B":
        sym = _lb(T.r, ks, ls)
    else:
        sym = _lw(T.r, ks, ls) - lagrange_multiplier(T) * _lb(T.r, ks, ls)
    sym = np.where(mask, 0.0, sym)
    return FourierField(T, field_.coef * sym)
