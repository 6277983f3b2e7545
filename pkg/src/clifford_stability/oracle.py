"""Finite-difference checks of the analytic spectrum on surfaces of revolution.

A direction ``delta(v)`` deforms the Clifford profile ``rho = arccos r`` into
``rho + tau(t) + t delta``. The shift ``tau(t)`` is solved so that the
conformal class stays fixed, which keeps the family admissible; the other
Teichmueller coordinate vanishes for every surface of revolution.

Orientation: increasing the profile moves points along ``-n``, where
``n = (sin rho e^{iu}, -cos rho e^{iv})``. So ``rho + t delta`` has velocity
``-delta n``. This is the only sign convention in the module; second
variations do not see it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .numerics import central_first, richardson, second_difference
from .revolution import Profile, clifford_profile, conformal_class, willmore_energy
from .spectrum import eigenvalue, lagrange_multiplier
from .torus import TorusParameter, geometric_data

__all__ = [
    "CorrectionError",
    "DbReport",
    "OracleReport",
    "VariationSpec",
    "VerificationError",
    "corrected_profile",
    "db_fd",
    "first_variation_fd",
    "lambda_from_quotient",
    "second_variation_fd",
    "verify_mode",
    "write_batch_csv",
]

DIRECTIONS = ("sin", "cos", "const")


class CorrectionError(RuntimeError):
    """No conformal-class-preserving shift was found in the bracket."""


class VerificationError(AssertionError):
    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)


@dataclass(frozen=True)
class VariationSpec:
    T: TorusParameter
    direction: str = "sin"
    l: int = 2
    step: float = 1e-2
    richardson_levels: int = 3
    n: int = 256

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if self.l < 0:
            raise ValueError("l must be nonnegative")
        if self.direction == "sin" and self.l == 0:
            raise ValueError("sin direction needs l >= 1")
        room = min(self.T.rho, math.pi / 2 - self.T.rho)
        if not 0.0 < self.step < 0.1 * room:
            raise ValueError(f"step must lie in (0, {0.1 * room:.3g}) for r = {self.T.r}")
        if self.richardson_levels < 1:
            raise ValueError("need at least one Richardson level")

    def delta(self, v):
        if self.direction == "sin":
            return np.sin(self.l * v)
        if self.direction == "cos" and self.l > 0:
            return np.cos(self.l * v)
        return np.ones_like(v)

    @property
    def norm_squared(self) -> float:
        """``int delta^2 dmu`` over the torus ``f_r``."""
        T = self.T
        return T.area if self.direction == "const" or self.l == 0 else 0.5 * T.area


@dataclass
class OracleReport:
    r: float
    l: int
    direction: str
    predicted: float
    measured: float
    rel_error: float
    constraint_residual: float
    error_estimate: float
    converged: bool
    predicted_closed_form: float
    rel_error_closed_form: float
    inconsistent: bool = False
    tau_values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau_values"] = {repr(t): tau for t, tau in sorted(self.tau_values.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x).__name__)


def _target_class(spec: VariationSpec) -> float:
    return conformal_class(clifford_profile(spec.T, spec.n))


def corrected_profile(spec: VariationSpec, t: float, target: float | None = None):
    """Profile ``rho + tau + t delta`` with the conformal class of ``rho``.

    Returns ``(profile, tau)``. The shift is found by Brent's method on the
    bracket ``(-rho/2, (pi/2 - rho)/2)``.
    """
    rho = spec.T.rho
    if target is None:
        target = _target_class(spec)
    v = 2.0 * math.pi * np.arange(spec.n) / spec.n
    base = rho + t * spec.delta(v)
    if t == 0.0:
        return Profile(np.full(spec.n, rho)), 0.0

    def mismatch(tau):
        return conformal_class(Profile(base + tau)) - target

    lo, hi = -rho / 2.0, (math.pi / 2.0 - rho) / 2.0
    try:
        flo, fhi = mismatch(lo), mismatch(hi)
    except ValueError as exc:
        raise CorrectionError(f"profile left the chart at t={t}") from exc
    if flo * fhi > 0.0:
        raise CorrectionError(f"conformal class not bracketed at t={t}")
    tau = brentq(mismatch, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return Profile(base + tau), tau


def _stencil(spec: VariationSpec):
    """Energies and constraint data on the Richardson stencil."""
    target = _target_class(spec)
    cache = {}

    def energy(t):
        if t not in cache:
            p, tau = corrected_profile(spec, t, target)
            cache[t] = (willmore_energy(p), tau, abs(conformal_class(p) - target))
        return cache[t][0]

    f0 = energy(0.0)
    steps = [spec.step * 0.5**j for j in range(spec.richardson_levels + 1)]
    est = [second_difference(energy, h, f0) for h in steps]
    return est, cache, f0


def second_variation_fd(spec: VariationSpec, band: float = 5e-3) -> OracleReport:
    """Measure ``d^2/dt^2 W`` along the corrected family and compare.

    ``predicted`` is ``int delta^2 dmu`` times the symbol ``lw - lam * lb``
    of the constrained stability operator; ``predicted_closed_form`` uses the
    factored eigenvalue ``E`` instead. ``converged`` requires the last
    Richardson correction to stay below a tenth of ``band`` relative to
    ``max(|measured|, 1)``.
    """
    est, cache, f0 = _stencil(spec)
    res = richardson(est, ratio=2.0, order=4)
    measured = float(res.value)

    T = spec.T
    if spec.direction == "const" or spec.l == 0:
        hess = closed = 0.0  # the corrected family does not move
    else:
        entry = eigenvalue(T, (0, spec.l))
        hess, closed = entry.hessian, entry.e
    norm2 = spec.norm_squared
    predicted = norm2 * hess
    predicted_closed = norm2 * closed
    scale = max(abs(predicted), 1.0)
    return OracleReport(
        r=T.r,
        l=spec.l,
        direction=spec.direction,
        predicted=predicted,
        measured=measured,
        rel_error=abs(measured - predicted) / scale,
        constraint_residual=max(c[2] for c in cache.values()),
        error_estimate=res.error,
        converged=res.error <= 0.1 * band * max(abs(measured), 1.0),
        predicted_closed_form=predicted_closed,
        rel_error_closed_form=abs(measured - predicted_closed) / max(abs(predicted_closed), 1.0),
        inconsistent=abs(measured) < 1e-8 and abs(predicted) > 1e-4,
        tau_values={t: c[1] for t, c in cache.items()},
    )


def _uncorrected_derivative(T, delta, functional, n=256, step=1e-2, levels=3):
    v = 2.0 * math.pi * np.arange(n) / n
    d = np.broadcast_to(delta(v) if callable(delta) else delta, v.shape)
    rho = T.rho

    def f(t):
        return functional(Profile(rho + t * d))

    est = [central_first(f, step * 0.5**j) for j in range(levels + 1)]
    return richardson(est, ratio=2.0, order=2), d


def first_variation_fd(T: TorusParameter, delta=1.0, n: int = 256):
    """``(measured, predicted)`` first variation of W along ``rho + t delta``.

    The prediction is ``1/2 int <W, -delta n> dmu = -1/2 wgrad int delta dmu``.
    """
    res, d = _uncorrected_derivative(T, delta, willmore_energy, n)
    wgrad = geometric_data(T).wgrad
    predicted = -0.5 * wgrad * float(np.mean(d)) * T.area
    return float(res.value), predicted


@dataclass(frozen=True)
class DbReport:
    measured: float
    normal_integral: float  # int <phi, n> dmu for phi = -delta n
    candidates: dict
    match: str | None

    def to_dict(self) -> dict:
        return asdict(self)


def db_fd(T: TorusParameter, delta=1.0, n: int = 256, rtol: float = 1e-8) -> DbReport:
    """Measure the derivative of the b-coordinate and test candidate factors.

    Two constants multiplying ``-int <phi, n> dmu`` are compared:
    ``1/(16 pi^2 r^3 s)`` (``"sixteen"``) and ``1/(4 pi^2 r^3 s)``
    (``"four"``). ``match`` names the one reproducing the measurement, or
    is ``None`` when both or neither do.
    """
    res, d = _uncorrected_derivative(T, delta, conformal_class, n)
    integral = -float(np.mean(d)) * T.area
    r, s = T.r, T.s
    cands = {
        "sixteen": -integral / (16.0 * math.pi**2 * r**3 * s),
        "four": -integral / (4.0 * math.pi**2 * r**3 * s),
    }
    measured = float(res.value)
    hits = [
        name
        for name, val in cands.items()
        if abs(val - measured) <= rtol * max(abs(measured), abs(val), 1e-300)
    ]
    return DbReport(measured, integral, cands, hits[0] if len(hits) == 1 else None)


def lambda_from_quotient(T: TorusParameter, n: int = 256) -> float:
    """Lagrange multiplier ``|W|^2 / (2 DB(W))`` with ``DB`` measured.

    ``W = wgrad n`` is constant along the normal, so ``DB(W) = -wgrad m``
    where ``m`` is the measured derivative of ``b`` along ``rho + t``.
    Returns 0 for the minimal torus, where ``W`` vanishes.
    """
    wgrad = geometric_data(T).wgrad
    if wgrad == 0.0:
        return 0.0
    m = db_fd(T, 1.0, n).measured
    w_norm2 = wgrad * wgrad * T.area
    return w_norm2 / (2.0 * (-wgrad * m))


@dataclass
class ModeVerification:
    r: float
    l: int
    sin: OracleReport
    cos: OracleReport
    expected_negative: bool
    passed: bool
    messages: list = field(default_factory=list)

    @property
    def reports(self):
        return [self.sin, self.cos]


def verify_mode(
    T: TorusParameter,
    l: int,
    tolerance: float = 5e-3,
    step: float = 1e-2,
    levels: int = 3,
    n: int = 256,
    raise_on_failure: bool = True,
) -> ModeVerification:
    """Run the sin and cos directions of mode ``(0, l)`` and cross-check.

    Checks agreement with the operator symbol within ``tolerance``,
    sin/cos agreement to 1e-6 relative, constraint residual <= 1e-12,
    Richardson convergence, and that the measured sign is negative exactly
    when ``l >= 2`` and ``l r < 1``. For ``l = 1`` the measurement must sit
    below the noise floor.
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    reps = [
        second_variation_fd(VariationSpec(T, d, l, step, levels, n), band=tolerance)
        for d in ("sin", "cos")
    ]
    expected_negative = l >= 2 and (l * l) * T.r * T.r < 1.0
    msgs = []
    for rep in reps:
        tag = f"{rep.direction}({l}v)"
        if rep.constraint_residual > 1e-12:
            msgs.append(f"{tag}: constraint residual {rep.constraint_residual:.3e}")
        if l == 1:
            floor = max(10.0 * rep.error_estimate, 1e-6 * willmore_energy(clifford_profile(T, n)))
            if abs(rep.measured) > floor:
                msgs.append(f"{tag}: zero mode measured {rep.measured:.3e} above floor {floor:.3e}")
            continue
        if rep.rel_error > tolerance:
            msgs.append(
                f"{tag}: measured {rep.measured:.10g} vs predicted {rep.predicted:.10g}"
                f" (rel {rep.rel_error:.3e} > {tolerance})"
            )
        if not rep.converged:
            msgs.append(f"{tag}: Richardson not converged (err {rep.error_estimate:.3e})")
        if (rep.measured < 0) != expected_negative:
            msgs.append(f"{tag}: sign {rep.measured:+.3e}, expected negative={expected_negative}")
    a, b = reps[0].measured, reps[1].measured
    if l > 1 and abs(a - b) > 1e-6 * max(abs(a), abs(b)):
        msgs.append(f"sin/cos mismatch {a:.12g} vs {b:.12g}")
    out = ModeVerification(T.r, l, reps[0], reps[1], expected_negative, not msgs, msgs)
    if msgs and raise_on_failure:
        raise VerificationError("; ".join(msgs), reps)
    return out


BATCH_COLUMNS = ("r", "l", "direction", "predicted", "measured", "rel_error", "converged")


def write_batch_csv(reports, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BATCH_COLUMNS)
    for rep in reports:
        w.writerow(
            [
                f"{rep.r:.12g}",
                rep.l,
                rep.direction,
                f"{rep.predicted:.12g}",
                f"{rep.measured:.12g}",
                f"{rep.rel_error:.12g}",
                int(rep.converged),
            ]
        )
