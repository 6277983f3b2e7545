"""Named invariant checks across all modules, plus the acceptance grid.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs them in a
fixed order. The command line ``verify`` subcommand is a thin wrapper.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import spectrum as _spectrum
from .numerics import richardson
from .oracle import (
    VariationSpec,
    db_fd,
    first_variation_fd,
    lambda_from_quotient,
    second_variation_fd,
    verify_mode,
)
from .revolution import clifford_profile, conformal_class, surface_data, willmore_energy
from .tensors import (
    FlatMetric,
    FourierField,
    SymTensorField,
    c_constant,
    d_divergence,
    d_trace,
    divergence,
    trace,
    tt_perturbation,
)
from .torus import (
    constrained_residual,
    geometric_data,
    isothermic_residual,
    make_torus,
    s_squared,
    willmore_energy_clifford,
)

__all__ = ["CHECKS", "CheckResult", "run_checks", "summary"]

SEED = 20240611
SQRT3_2 = math.sqrt(3.0) / 2.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _radii(count, lo=0.02, hi=0.98, seed=SEED):
    return np.random.default_rng(seed).uniform(lo, hi, count)


# torus ---------------------------------------------------------------------


def check_torus_identities():
    worst = 0.0
    for r in _radii(200):
        T = make_torus(r)
        d = geometric_data(T)
        worst = max(
            worst,
            abs(T.r**2 + T.s**2 - 1.0),
            abs(d.h - (d.a11 + d.a22)) / max(abs(d.h), 1.0),
            abs(willmore_energy_clifford(T) - T.area * (d.h**2 / 4 + 1)) / willmore_energy_clifford(T),
        )
    return worst <= 1e-12, f"max identity defect {worst:.2e}", {"max_defect": worst}


def check_torus_constrained():
    worst = 0.0
    for r in _radii(200):
        T = make_torus(r)
        rel = constrained_residual(T) / max(abs(geometric_data(T).wgrad), 1.0)
        worst = max(worst, rel, isothermic_residual(T))
    return worst <= 1e-14, f"max residual {worst:.2e}", {"max_residual": worst}


def check_torus_minimum():
    rs = np.linspace(0.001, 0.999, 9999)
    energies = np.pi**2 / (rs * np.sqrt((1 - rs) * (1 + rs)))
    r_min = float(rs[np.argmin(energies)])
    ok = abs(r_min - 1 / math.sqrt(2)) < 2e-4 and abs(energies.min() - 2 * math.pi**2) < 1e-6
    return ok, f"minimum at r={r_min:.6f}", {"r_min": r_min}


# tensor_flat -----------------------------------------------------------------


def _random_tensor(T, rng, kmax, amplitude=1.0):
    f = lambda: FourierField.random(T, kmax, rng, (32, 32), amplitude)
    return SymTensorField(f(), f(), f())


def _fd_rel_error(fun, base, h, exact):
    ests = []
    for t in (1e-3, 1e-4):
        ests.append((fun(base + h * t) - fun(base - h * t)) / (2 * t))
    val = richardson(ests, ratio=10.0, order=2).value
    return float(np.max(np.abs(val - exact)) / np.max(np.abs(exact)))


def check_tensor_derivatives():
    """d_trace and d_divergence against central differences in the metric."""
    T = make_torus(0.6)
    rng = np.random.default_rng(SEED)
    euc = FlatMetric()
    base = SymTensorField.euclidean(T, (32, 32))
    worst_tr = worst_div = 0.0
    for _ in range(5):
        q = _random_tensor(T, rng, 3)
        h = _random_tensor(T, rng, 3, 0.5)
        worst_tr = max(
            worst_tr,
            _fd_rel_error(lambda g: trace(g, q).values(), base, h, d_trace(euc, q, h).values()),
        )

        def div(g):
            w = divergence(g, q)
            return np.stack([w.c1.values(), w.c2.values()])

        dd = d_divergence(euc, q, h)
        exact = np.stack([dd.c1.values(), dd.c2.values()])
        worst_div = max(worst_div, _fd_rel_error(div, base, h, exact))
    ok = worst_tr <= 1e-8 and worst_div <= 1e-8
    return ok, f"d_trace {worst_tr:.2e}, d_divergence {worst_div:.2e}", {
        "d_trace_rel_error": worst_tr,
        "d_divergence_rel_error": worst_div,
    }


def check_tensor_examples():
    T = make_torus(0.6)
    q1, q2 = SymTensorField.q1(T), SymTensorField.q2(T)
    euc = FlatMetric()
    worst = max(
        np.max(np.abs(d_trace(euc, q2, q2).values() + 2.0)),
        np.max(np.abs(trace(euc, q1).values())),
        abs(q1.inner(q1) / (8 * math.pi**2 * T.r * T.s) - 1.0),
        abs(q1.inner(q2)),
    )
    g = FlatMetric.teichmueller(T, 0.0, T.b)
    worst = max(worst, abs(g.g22 - 1.0), abs(g.g12))
    return worst <= 1e-13, f"max defect {worst:.2e}", {"max_defect": float(worst)}


def check_fourier_constants(kmax=16):
    """Poisson-solve constants against the closed form for k, l <= kmax."""
    T = make_torus(0.37)
    shape = (64, 64)
    q2 = SymTensorField.q2(T, shape)
    worst = 0.0
    for k in range(kmax + 1):
        for l in range(kmax + 1):
            if k == 0 and l == 0:
                continue
            phi = FourierField.mode(T, k, l, "cos", "sin" if l else "cos", shape)
            u2 = tt_perturbation(q2 * phi).tt_coefficients()[1]
            worst = max(worst, float(np.max(np.abs(u2.values() + c_constant(T, k, l) * phi.values()))))
    return worst <= 1e-12, f"max |u2 + c phi| {worst:.2e}", {"max_error": worst, "kmax": kmax}


# spectrum --------------------------------------------------------------------


def check_zero_modes():
    worst = 0.0
    for r in _radii(1000, 0.001, 0.999):
        T = make_torus(r)
        for kl in ((1, 0), (0, 1), (1, 1)):
            worst = max(worst, abs(_spectrum.eigenvalue(T, kl).e))
    return worst <= 1e-12, f"max |E| at (1,0), (0,1), (1,1): {worst:.2e}", {"max_abs": worst}


def _identity_defect(factor):
    """Worst ``|lw - lam lb - factor E|`` over k, l <= 10 and 100 radii.

    Measured against the largest of ``|E|, |lw|, |lam lb|, 1`` because the
    two symbols cancel almost completely for small ``r``.
    """
    r = _radii(100)[:, None, None]
    k = np.arange(11.0)[None, :, None]
    l = np.arange(11.0)[None, None, :]
    k, l = np.where((k == 0) & (l == 0), 1.0, k), l  # (0, 0) replaced by (1, 0)
    s2 = s_squared(r)
    lam = -math.pi**2 * (r * r - s2) / s2
    lw, lb, e = _spectrum._lw(r, k, l), _spectrum._lb(r, k, l), _spectrum._e(r, k, l)
    scale = np.maximum.reduce([np.abs(e), np.abs(lw), np.abs(lam * lb), np.ones_like(e)])
    return float(np.max(np.abs(lw - lam * lb - factor * e) / scale))


def check_cross_derivation():
    """``lw - lam * lb == E`` as stated for the factored eigenvalue."""
    worst = _identity_defect(1.0)
    return worst <= 1e-10, f"max rel defect {worst:.3e} (1/2 means E is twice the form)", {
        "max_rel_defect": worst
    }


def check_hessian_identity():
    """``lw - lam * lb == E / 2``, the relation confirmed by the oracle."""
    worst = _identity_defect(0.5)
    return worst <= 1e-10, f"max rel defect {worst:.2e}", {"max_rel_defect": worst}


def check_stability_interval(count=10_000):
    rs = np.linspace(0.0, 1.0, count + 2)[1:-1]
    idx = _spectrum.morse_index_grid(rs)
    expected = (rs >= 0.5) & (rs <= SQRT3_2)
    bad = int(np.sum((idx == 0) != expected))
    th = {(t.family, t.index): t.r_root for t in _spectrum.thresholds(2)}
    d_lo, d_hi = abs(th[("l", 2)] - 0.5), abs(th[("k", 2)] - SQRT3_2)
    ok = bad == 0 and d_lo <= 1e-10 and d_hi <= 1e-10
    return ok, f"{bad} misclassified of {count}; roots off by {d_lo:.1e}, {d_hi:.1e}", {
        "misclassified": bad,
        "root_low": th[("l", 2)],
        "root_high": th[("k", 2)],
    }


def check_morse_staircase():
    failures = []
    for k in range(1, 7):
        lo, hi = 1.0 / (k + 2), 1.0 / (k + 1)
        for r in (lo, 0.5 * (lo + hi), hi - 1e-9):
            rep = _spectrum.morse_index(make_torus(r))
            mults = [m for *_, m in rep.negative_modes]
            if (
                rep.morse_index != k
                or rep.witnesses() != [(0, l) for l in range(2, k + 2)]
                or mults != [2] * k
            ):
                failures.append(r)
    return not failures, f"{len(failures)} failing radii", {"failing_radii": failures}


# revolution ------------------------------------------------------------------


def check_quadrature():
    we = wc = 0.0
    for r in _radii(100, 0.05, 0.95):
        T = make_torus(r)
        p = clifford_profile(T, 256)
        we = max(we, abs(willmore_energy(p) / willmore_energy_clifford(T) - 1.0))
        wc = max(wc, abs(conformal_class(p) / T.b - 1.0))
    return we <= 1e-10 and wc <= 1e-12, f"energy {we:.2e}, class {wc:.2e}", {
        "energy_rel_error": we,
        "class_rel_error": wc,
    }


def check_surface_frame():
    T = make_torus(0.45)
    p = clifford_profile(T, 64)
    v = p.v
    sd = surface_data(type(p)(T.rho + 0.1 * np.sin(2 * v) + 0.05 * np.cos(3 * v)))
    dot = lambda a, b: np.einsum("in,in->n", a, b)
    worst = max(
        np.max(np.abs(dot(sd.position, sd.position) - 1.0)),
        np.max(np.abs(dot(sd.normal, sd.normal) - 1.0)),
        *(np.max(np.abs(dot(sd.normal, w))) for w in (sd.position, sd.du, sd.dv)),
        np.max(np.abs(sd.F)),
    )
    return worst <= 1e-12, f"max frame defect {worst:.2e}", {"max_defect": float(worst)}


# variation_oracle --------------------------------------------------------------


def _oracle(r, l, direction="sin"):
    return second_variation_fd(VariationSpec(make_torus(r), direction, l))


def check_oracle_stable_point():
    rep = _oracle(1 / math.sqrt(2), 2)
    target = 24 * math.pi**2
    rel = abs(rep.measured - target) / target
    ok = rel <= 5e-3 and rep.constraint_residual <= 1e-12
    return ok, f"measured {rep.measured:.6f} vs 24 pi^2 = {target:.6f} (rel {rel:.3e})", {
        "measured": rep.measured,
        "target": target,
        "rel_error": rel,
        "constraint_residual": rep.constraint_residual,
    }


def check_oracle_unstable_points():
    rows, ok = [], True
    for r, l in ((0.4, 2), (0.3, 2), (0.3, 3)):
        rep = _oracle(r, l)
        target = rep.predicted_closed_form
        rel = abs(rep.measured - target) / abs(target)
        good = rep.measured < 0 and rel <= 1e-2
        ok &= good
        rows.append({"r": r, "l": l, "measured": rep.measured, "target": target, "rel_error": rel})
    worst = max(row["rel_error"] for row in rows)
    return ok, f"worst rel error vs 2 pi^2 r s E: {worst:.3e}", {"points": rows}


def check_oracle_operator_agreement():
    """Measured second variation against the operator symbol on a grid."""
    rows, ok = [], True
    for r in (0.3, 0.4, 0.6, 1 / math.sqrt(2), 0.8):
        for l in (1, 2, 3):
            out = verify_mode(make_torus(r), l, raise_on_failure=False)
            ok &= out.passed
            rows.append({"r": r, "l": l, "passed": out.passed, "messages": out.messages})
    failed = [row for row in rows if not row["passed"]]
    return ok, f"{len(rows) - len(failed)}/{len(rows)} modes agree", {"points": rows}


def check_first_variation():
    worst_dw = worst_lam = 0.0
    for r in (0.2, 0.45, 0.6, 0.9):
        T = make_torus(r)
        measured, _ = first_variation_fd(T, 1.0)
        closed = -math.pi**2 * (r * r - T.s**2) / (r * r * T.s**2)
        worst_dw = max(worst_dw, abs(measured - closed) / max(abs(closed), 1.0))
        lam = _spectrum.lagrange_multiplier(T)
        worst_lam = max(worst_lam, abs(lambda_from_quotient(T) - lam) / abs(lam))
    lam_sq = _spectrum.lagrange_multiplier(make_torus(1 / math.sqrt(2)))
    ok = worst_dw <= 1e-8 and worst_lam <= 1e-10 and lam_sq == 0.0
    return ok, f"dW/drho {worst_dw:.2e}, lambda {worst_lam:.2e}, lambda(1/sqrt2) = {lam_sq}", {
        "dw_rel_error": worst_dw,
        "lambda_rel_error": worst_lam,
        "lambda_minimal": lam_sq,
    }


def check_factor_adjudication():
    rep = db_fd(make_torus(0.5), 1.0)
    return rep.match is not None, f"db_fd matches {rep.match!r}", rep.to_dict()


CHECKS = [
    ("torus.identities", check_torus_identities),
    ("torus.constrained_willmore", check_torus_constrained),
    ("torus.energy_minimum", check_torus_minimum),
    ("tensor.examples", check_tensor_examples),
    ("tensor.derivatives_fd", check_tensor_derivatives),
    ("tensor.fourier_constants", check_fourier_constants),
    ("spectrum.zero_modes", check_zero_modes),
    ("spectrum.cross_derivation", check_cross_derivation),
    ("spectrum.hessian_identity", check_hessian_identity),
    ("spectrum.stability_interval", check_stability_interval),
    ("spectrum.morse_staircase", check_morse_staircase),
    ("revolution.quadrature", check_quadrature),
    ("revolution.frame", check_surface_frame),
    ("oracle.stable_point", check_oracle_stable_point),
    ("oracle.unstable_points", check_oracle_unstable_points),
    ("oracle.operator_agreement", check_oracle_operator_agreement),
    ("oracle.first_variation", check_first_variation),
    ("oracle.factor_adjudication", check_factor_adjudication),
]


def run_checks(names=None) -> list[CheckResult]:
    selected = [(n, f) for n, f in CHECKS if names is None or n in names]
    out = []
    for name, func in selected:
        t0 = time.perf_counter()
        try:
            passed, detail, data = func()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail, data = False, f"{type(exc).__name__}: {exc}", {}
        out.append(CheckResult(name, bool(passed), detail, data, time.perf_counter() - t0))
    return out


def summary(results) -> dict:
    failed = [r.name for r in results if not r.passed]
    return {
        "status": "PASS" if not failed else "FAIL",
        "failed": failed,
        "seconds": sum(r.seconds for r in results),
        "checks": [r.to_dict() for r in results],
    }
