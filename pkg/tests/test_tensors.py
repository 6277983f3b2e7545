import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifford_stability.numerics import richardson
from clifford_stability.tensors import (
    FlatMetric,
    FourierField,
    SymTensorField,
    c_constant,
    d_divergence,
    d_trace,
    divergence,
    grid,
    trace,
    tt_perturbation,
)
from clifford_stability.torus import make_torus

T = make_torus(0.6)
SHAPE = (32, 32)
EUC = FlatMetric()


def _analytic_mode(T, k, l, pu, pv, shape=SHAPE):
    """Mode values and both partial derivatives, differentiated by hand."""
    u, v = grid(T, shape)
    x, y = k * u / T.r, l * v / T.s
    f = {"cos": np.cos, "sin": np.sin}
    df = {"cos": lambda z: -np.sin(z), "sin": np.cos}
    a, b = f[pu](x), f[pv](y)
    da, db = df[pu](x) * k / T.r, df[pv](y) * l / T.s
    ones = np.ones(shape)
    return a * b * ones, da * b * ones, a * db * ones


def _close(field, values, tol=1e-12):
    return np.max(np.abs(field.values() - values)) <= tol * max(1.0, np.max(np.abs(values)))


# trace / divergence ------------------------------------------------------


def test_trace_of_tt_basis_and_metric():
    assert _close(trace(EUC, SymTensorField.q1(T)), 0.0)
    assert _close(trace(EUC, SymTensorField.q2(T)), 0.0)
    assert _close(trace(EUC, SymTensorField.euclidean(T)), 2.0)


def test_trace_with_chart_metric():
    g = FlatMetric.teichmueller(T, 0.3, 1.2)
    q = SymTensorField.from_matrix(T, ((1.0, 0.5), (0.5, 2.0)))
    expected = np.sum(g.inverse() * np.array([[1.0, 0.5], [0.5, 2.0]]))
    assert _close(trace(g, q), expected)


def test_chart_metric_is_flat_metric_at_base_point():
    g = FlatMetric.teichmueller(T, 0.0, T.b)
    assert g.g11 == 1.0 and g.g12 == 0.0
    assert g.g22 == pytest.approx(1.0, rel=1e-15)


def test_degenerate_metric_rejected():
    with pytest.raises(ValueError):
        FlatMetric(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        trace(SymTensorField.from_matrix(T, ((1.0, 0.0), (0.0, -1.0))), SymTensorField.q1(T))


def test_divergence_of_constant_tensor_vanishes():
    w = divergence(EUC, SymTensorField.from_matrix(T, ((2.0, -1.0), (-1.0, 3.0))))
    assert w.max_abs_coef() < 1e-15


@pytest.mark.parametrize("k, l, pu, pv", [(1, 2, "cos", "sin"), (3, 1, "sin", "cos"), (0, 4, "cos", "cos")])
def test_divergence_of_scaled_tt_tensors(k, l, pu, pv):
    vals, d1, d2 = _analytic_mode(T, k, l, pu, pv)
    phi = FourierField.from_values(T, vals)
    w2 = divergence(EUC, SymTensorField.q2(T) * phi)
    assert _close(w2.c1, -d1) and _close(w2.c2, d2)
    w1 = divergence(EUC, SymTensorField.q1(T) * phi)
    assert _close(w1.c1, d2) and _close(w1.c2, d1)


def test_field_metric_divergence_reduces_to_flat_one():
    rng = np.random.default_rng(1)
    q = _random_tensor(rng, 3)
    a = divergence(EUC, q)
    b = divergence(SymTensorField.euclidean(T, SHAPE), q)
    assert (a - b).max_abs_coef() < 1e-13


# metric derivatives --------------------------------------------------------


def _random_tensor(rng, kmax, amplitude=1.0, shape=SHAPE):
    f = lambda: FourierField.random(T, kmax, rng, shape, amplitude)
    return SymTensorField(f(), f(), f())


def test_d_trace_examples():
    q2, q1 = SymTensorField.q2(T), SymTensorField.q1(T)
    assert _close(d_trace(EUC, q2, q2), -2.0)
    assert _close(d_trace(EUC, q1, q2), 0.0)
    zero = SymTensorField.from_matrix(T, ((0.0, 0.0), (0.0, 0.0)))
    assert _close(d_trace(EUC, q2, zero), 0.0)


def _fd(fun, base, h, ts=(1e-3, 1e-4)):
    """Central differences in t of fun(base + t h), Richardson-extrapolated."""
    ests = []
    for t in ts:
        plus = fun(base + h * t)
        minus = fun(base - h * t)
        ests.append((plus - minus) / (2 * t))
    return richardson(ests, ratio=ts[0] / ts[1], order=2)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("metric", ["euclidean", "chart"])
def test_d_trace_matches_finite_difference(seed, metric):
    rng = np.random.default_rng(seed)
    g = EUC if metric == "euclidean" else FlatMetric.teichmueller(T, 0.2, 0.9)
    gfield = SymTensorField.from_matrix(T, g.matrix().tolist(), SHAPE)
    q = _random_tensor(rng, 3)
    h = _random_tensor(rng, 3, 0.5)
    res = _fd(lambda gg: trace(gg, q).values(), gfield, h)
    exact = d_trace(g, q, h).values()
    assert np.max(np.abs(res.value - exact)) <= 1e-8 * np.max(np.abs(exact))


@pytest.mark.parametrize("seed", range(4))
def test_d_divergence_matches_finite_difference(seed):
    rng = np.random.default_rng(100 + seed)
    base = SymTensorField.euclidean(T, SHAPE)
    q = _random_tensor(rng, 3)
    h = _random_tensor(rng, 3, 0.5)

    def div_values(gg):
        w = divergence(gg, q)
        return np.stack([w.c1.values(), w.c2.values()])

    res = _fd(div_values, base, h)
    dd = d_divergence(EUC, q, h)
    exact = np.stack([dd.c1.values(), dd.c2.values()])
    assert np.max(np.abs(res.value - exact)) <= 1e-8 * np.max(np.abs(exact))


def test_d_divergence_trivial_cases():
    rng = np.random.default_rng(5)
    q = _random_tensor(rng, 2)
    zero = SymTensorField.from_matrix(T, ((0.0, 0.0), (0.0, 0.0)))
    assert d_divergence(EUC, q, zero).max_abs_coef() < 1e-15
    cq = SymTensorField.from_matrix(T, ((1.0, 2.0), (2.0, -1.0)))
    ch = SymTensorField.from_matrix(T, ((0.5, 0.1), (0.1, 0.3)))
    assert d_divergence(EUC, cq, ch).max_abs_coef() < 1e-15


def test_d_divergence_rejects_other_base_metrics():
    q = SymTensorField.q2(T)
    with pytest.raises(ValueError):
        d_divergence(FlatMetric(2.0, 0.0, 1.0), q, q)


# TT perturbation and the constants c_r(k, l) -------------------------------------


@pytest.mark.parametrize("r", [0.3, 1 / math.sqrt(2), 0.85])
@pytest.mark.parametrize("k, l", [(1, 0), (0, 1), (2, 3), (4, 1), (3, 3)])
@pytest.mark.parametrize("pu, pv", [("cos", "cos"), ("sin", "cos"), ("cos", "sin"), ("sin", "sin")])
def test_tt_perturbation_reproduces_constants(r, k, l, pu, pv):
    if (k == 0 and pu == "sin") or (l == 0 and pv == "sin"):
        pytest.skip("no sin mode at frequency 0")
    Tr = make_torus(r)
    phi = FourierField.mode(Tr, k, l, pu, pv)
    eta = tt_perturbation(SymTensorField.q2(Tr) * phi)
    u1, u2 = eta.tt_coefficients()
    c = c_constant(Tr, k, l)
    assert np.max(np.abs(u2.values() + c * phi.values())) < 1e-12
    # alpha along q^1 lands on u1 with the opposite sign convention
    eta1 = tt_perturbation(SymTensorField.q1(Tr) * phi)
    assert np.max(np.abs(eta1.tt_coefficients()[0].values() - c * phi.values())) < 1e-12


@pytest.mark.parametrize("mu", [1, 2])
@pytest.mark.parametrize("seed", range(3))
def test_tt_perturbation_solves_first_order_system(mu, seed):
    rng = np.random.default_rng(seed)
    a1 = FourierField.random(T, 4, rng)
    a2 = FourierField.random(T, 4, rng)
    alpha = SymTensorField.tracefree(a1, a2)
    eta = tt_perturbation(alpha, mu)
    assert eta.is_tracefree()
    lhs = divergence(EUC, eta)
    da = divergence(EUC, alpha)
    if mu == 2:
        rhs = (-da.c1, da.c2)
    else:
        rhs = (da.c2, da.c1)
    assert (lhs.c1 - rhs[0]).max_abs_coef() < 1e-13
    assert (lhs.c2 - rhs[1]).max_abs_coef() < 1e-13
    # zero-mean normalization: orthogonal to both TT tensors
    for q in (SymTensorField.q1(T), SymTensorField.q2(T)):
        assert abs(eta.inner(q)) < 1e-12


def test_tt_perturbation_of_constant_is_zero():
    alpha = SymTensorField.q2(T) * 3.0
    assert tt_perturbation(alpha).t11.max_abs_coef() == 0.0


def test_tt_perturbation_requires_tracefree_input():
    with pytest.raises(ValueError):
        tt_perturbation(SymTensorField.euclidean(T))


def test_c_constant_examples():
    for r in (0.2, 0.5, 0.9):
        Tr = make_torus(r)
        assert c_constant(Tr, 1, 0) == 1.0
        for l in range(1, 5):
            assert c_constant(Tr, 0, l) == -1.0
    Ts = make_torus(1 / math.sqrt(2))
    for k in range(1, 6):
        assert c_constant(Ts, k, k) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        c_constant(Ts, 0, 0)


@settings(max_examples=200)
@given(
    st.floats(min_value=0.01, max_value=0.99),
    st.integers(0, 30),
    st.integers(0, 30),
)
def test_c_constant_bounds_and_swap(r, k, l):
    if k == 0 and l == 0:
        return
    Tr = make_torus(r)
    c = c_constant(Tr, k, l)
    assert -1.0 <= c <= 1.0
    assert c_constant(Tr.swapped(), l, k) == pytest.approx(-c, abs=1e-9)


@pytest.mark.parametrize("r", [0.25, 0.6, 0.95])
def test_tt_tensor_norms(r):
    Tr = make_torus(r)
    q1, q2 = SymTensorField.q1(Tr), SymTensorField.q2(Tr)
    target = 8 * math.pi**2 * r * Tr.s
    assert q1.inner(q1) == pytest.approx(target, rel=1e-14)
    assert q2.inner(q2) == pytest.approx(target, rel=1e-14)
    assert q1.inner(q2) == 0.0
