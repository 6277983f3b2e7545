"""Closed-form geometry of the CMC Clifford tori ``r S^1 x s S^1`` in S^3.

Every normal-valued tensor on these tori is a constant multiple of the unit
normal, so only the scalar coefficients along the normal are kept here.
The normal itself is ``(s e^{iu/r}, -r e^{iv/s})`` in flat coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometricData",
    "TorusParameter",
    "constrained_residual",
    "geometric_data",
    "isothermic_residual",
    "make_torus",
    "s_squared",
    "willmore_energy_clifford",
]


@dataclass(frozen=True)
class TorusParameter:
    """The radius pair ``(r, s)`` with ``r**2 + s**2 == 1``.

    Build instances with :func:`make_torus`; ``s`` is derived from ``r``.
    """

    r: float
    s: float = field(init=False)

    def __post_init__(self):
        r = float(self.r)
        if not (0.0 < r < 1.0) or math.isnan(r):
            raise ValueError(f"radius must lie in (0, 1), got {self.r!r}")
        s = math.sqrt(s_squared(r))
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    @property
    def is_minimal(self) -> bool:
        return self.r == self.s

    @property
    def b(self) -> float:
        """Teichmueller b-coordinate ``s/r`` (the a-coordinate is zero)."""
        return self.s / self.r

    @property
    def rho(self) -> float:
        """Latitude ``arccos r`` of the profile curve, in ``(0, pi/2)``."""
        return math.acos(self.r)

    @property
    def area(self) -> float:
        return 4.0 * math.pi**2 * self.r * self.s

    def swapped(self) -> "TorusParameter":
        """The same torus with the roles of the two circles exchanged."""
        return make_torus(self.s)


def _snaps_to_minimal(r):
    # the doubles nearest 1/sqrt(2) stand for the minimal torus; s is snapped
    # onto r there so that r^2 - s^2, the mean curvature and lambda vanish
    s = np.sqrt((1.0 - r) * (1.0 + r))
    return np.abs(s - r) <= 2.0 * np.spacing(r)


def s_squared(r):
    """``1 - r**2`` as ``(1 - r)(1 + r)``, equal to ``r**2`` at the minimal torus."""
    if isinstance(r, float):
        s2 = (1.0 - r) * (1.0 + r)
        return r * r if abs(math.sqrt(s2) - r) <= 2.0 * math.ulp(r) else s2
    r = np.asarray(r, dtype=float)
    out = np.where(_snaps_to_minimal(r), r * r, (1.0 - r) * (1.0 + r))
    return float(out) if out.ndim == 0 else out


def make_torus(r: float) -> TorusParameter:
    """Return the Clifford torus parameter for radius ``r`` in ``(0, 1)``."""
    return TorusParameter(r)


@dataclass(frozen=True)
class GeometricData:
    """Coefficients along the unit normal of the tensors living on ``f_r``.

    ``a11`` and ``a22`` are the second fundamental form (``a12 == 0``),
    ``h`` the mean curvature, ``atf`` the magnitude of the tracefree part
    and ``wgrad`` the Willmore gradient.
    """

    a11: float
    a22: float
    h: float
    atf: float
    wgrad: float
    a12: float = 0.0


def geometric_data(T: TorusParameter) -> GeometricData:
    r, s = T.r, T.s
    a11 = -s / r
    a22 = r / s
    return GeometricData(
        a11=a11,
        a22=a22,
        h=(r * r - s * s) / (r * s),
        atf=1.0 / (2.0 * r * s),
        wgrad=(r * r - s * s) / (2.0 * r**3 * s**3),
    )


def willmore_energy_clifford(T: TorusParameter) -> float:
    """Willmore energy ``pi**2 / (r s)``.

    With constant mean curvature the integrand ``h**2/4 + 1`` is constant and
    ``(r**2 - s**2)**2 / (4 r**2 s**2) + 1 == 1 / (4 r**2 s**2)``, which
    multiplied by the area ``4 pi**2 r s`` gives the closed form.
    """
    return math.pi**2 / (T.r * T.s)


_Q1 = ((0.0, 1.0), (1.0, 0.0))
_Q2 = ((-1.0, 0.0), (0.0, 1.0))


def _tracefree_pairing(T: TorusParameter, q) -> float:
    # normal coefficient of g(A°, q) = A°_ij q_ij at the flat metric
    d = geometric_data(T)
    half = 0.5 * (d.a11 - d.a22)
    atf = ((half, d.a12), (d.a12, -half))
    return sum(atf[i][j] * q[i][j] for i in range(2) for j in range(2))


def constrained_residual(T: TorusParameter) -> float:
    """``|W - (r^2-s^2)/(2 r^2 s^2) g(A°, q^2)|`` along the normal."""
    r, s = T.r, T.s
    factor = (r * r - s * s) / (2.0 * r * r * s * s)
    return abs(geometric_data(T).wgrad - factor * _tracefree_pairing(T, _Q2))


def isothermic_residual(T: TorusParameter) -> float:
    """Normal coefficient of ``g(A°, q^1)``; identically zero."""
    return abs(_tracefree_pairing(T, _Q1))
