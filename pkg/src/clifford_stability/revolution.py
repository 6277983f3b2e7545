"""Rotationally symmetric tori ``h(u, v) = (cos g(v) e^{iu}, sin g(v) e^{iv})`` in S^3.

Points of C^2 are stored as real 4-vectors ``(Re z1, Im z1, Re z2, Im z2)``.
All integrands are independent of ``u`` (rotation in the first factor is an
isometry), so everything is evaluated on the circle ``u = 0`` and the ``u``
integral contributes a factor ``2 pi``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .torus import TorusParameter

__all__ = [
    "GeometryError",
    "Profile",
    "SurfaceData",
    "clifford_profile",
    "conformal_class",
    "spectral_derivative",
    "surface_data",
    "willmore_energy",
]

_EDGE = 1e-6


class GeometryError(ValueError):
    """The profile leaves the chart ``0 < g < pi/2``."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Profile:
    """Samples ``g(2 pi j / n)`` of a periodic profile curve."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or not _is_pow2(vals.size) or vals.size < 16:
            raise ValueError("profile needs a power-of-two sample count >= 16")
        if np.any(vals <= 0.0) or np.any(vals >= math.pi / 2):
            raise GeometryError("profile must lie in (0, pi/2)")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def v(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n) / self.n

    @classmethod
    def from_function(cls, func, n: int = 256) -> "Profile":
        v = 2.0 * math.pi * np.arange(n) / n
        return cls(np.asarray(func(v), dtype=float) * np.ones(n))

    def shifted(self, places: int) -> "Profile":
        return Profile(np.roll(self.values, places))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": [float(x) for x in self.values]})

    @classmethod
    def from_json(cls, text: str) -> "Profile":
        data = json.loads(text)
        vals = data["values"]
        if int(data["n"]) != len(vals):
            raise ValueError("sample count does not match 'n'")
        return cls(np.asarray(vals, dtype=float))


def clifford_profile(T: TorusParameter, n: int = 256) -> Profile:
    """Constant profile at latitude ``arccos r``."""
    if n < 16 or not _is_pow2(n):
        raise ValueError("n must be a power of two >= 16")
    return Profile(np.full(n, T.rho))


def spectral_derivative(f: np.ndarray, order: int = 1) -> np.ndarray:
    """Derivative of ``2 pi``-periodic samples by Fourier multiplication."""
    n = f.size
    c = np.fft.rfft(f)
    k = np.arange(c.size)
    c = c * (1j * k) ** order
    if order % 2 and n % 2 == 0:
        c[-1] = 0.0
    return np.fft.irfft(c, n)


@dataclass(frozen=True)
class SurfaceData:
    """Per-sample geometry along the meridian ``u = 0``."""

    v: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    d2gamma: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    position: np.ndarray  # (4, n)
    du: np.ndarray
    dv: np.ndarray
    normal: np.ndarray
    A11: np.ndarray
    A12: np.ndarray
    A22: np.ndarray
    h: np.ndarray

    @property
    def area_element(self) -> np.ndarray:
        return np.sqrt(self.E * self.G)

    def rows(self):
        for row in zip(self.v, self.gamma, self.E, self.G, self.h):
            yield tuple(float(x) for x in row)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["v", "gamma", "E", "G", "h"])
        for row in self.rows():
            w.writerow([f"{x:.12g}" for x in row])


def _c2(z1, z2):
    """Stack two complex sample arrays into real 4-vectors."""
    z1, z2 = np.broadcast_arrays(z1, z2)
    return np.stack([np.real(z1), np.imag(z1), np.real(z2), np.imag(z2)])


def _dot(a, b):
    return np.einsum("in,in->n", a, b)


def normal_seed(g, dg, v):
    """Unnormalized normal candidate ``(sin g, -cos g e^{iv} - i g'/sin g e^{iv})``.

    Only parallel to the unit normal where ``g' = 0``; used to seed the
    orthonormalization and to fix the orientation.
    """
    eiv = np.exp(1j * v)
    return _c2(np.sin(g), (-np.cos(g) - 1j * dg / np.sin(g)) * eiv)


def _check_edges(g):
    if np.any(g < _EDGE) or np.any(g > math.pi / 2 - _EDGE):
        raise GeometryError("profile touches the degenerate circles of the chart")


def surface_data(p: Profile) -> SurfaceData:
    g = p.values
    _check_edges(g)
    v = p.v
    g1 = spectral_derivative(g, 1)
    g2 = spectral_derivative(g, 2)
    cg, sg = np.cos(g), np.sin(g)
    eiv = np.exp(1j * v)

    pos = _c2(cg, sg * eiv)
    hu = _c2(1j * cg, 0j)
    hv = _c2(-sg * g1, (cg * g1 + 1j * sg) * eiv)
    huu = _c2(-cg, 0j)
    huv = _c2(-1j * sg * g1, 0j)
    hvv = _c2(
        -(cg * g1 * g1 + sg * g2),
        (-sg * g1 * g1 + cg * g2 - sg + 2j * cg * g1) * eiv,
    )

    # Gram-Schmidt of the seed against {position, h_u, h_v}
    basis = []
    for w in (pos, hu, hv):
        for b in basis:
            w = w - _dot(w, b) * b
        basis.append(w / np.sqrt(_dot(w, w)))
    n = normal_seed(g, g1, v)
    for b in basis:
        n = n - _dot(n, b) * b
    n = n / np.sqrt(_dot(n, n))

    E = cg * cg
    G = g1 * g1 + sg * sg
    A11 = _dot(huu, n)
    A12 = _dot(huv, n)
    A22 = _dot(hvv, n)
    return SurfaceData(
        v=v,
        gamma=g,
        dgamma=g1,
        d2gamma=g2,
        E=E,
        F=_dot(hu, hv),
        G=G,
        position=pos,
        du=hu,
        dv=hv,
        normal=n,
        A11=A11,
        A12=A12,
        A22=A22,
        h=A11 / E + A22 / G,
    )


def willmore_energy(p: Profile) -> float:
    """``int (h^2/4 + 1) dmu`` by the trapezoid rule in ``v`` (exact in ``u``)."""
    sd = surface_data(p)
    integrand = (0.25 * sd.h**2 + 1.0) * sd.area_element
    return 2.0 * math.pi * 2.0 * math.pi * float(np.mean(integrand))


def conformal_class(p: Profile) -> float:
    """Teichmueller b-coordinate ``(1/2 pi) int sqrt(g'^2 + sin^2 g) / cos g dv``.

    In the coordinate ``w = int sqrt(G)/cos g dv`` the metric is conformal to
    ``du^2 + dw^2``, a rectangle with sides ``2 pi`` and ``2 pi * omega``.
    """
    g = p.values
    _check_edges(g)
    g1 = spectral_derivative(g, 1)
    return float(np.mean(np.sqrt(g1 * g1 + np.sin(g) ** 2) / np.cos(g)))
