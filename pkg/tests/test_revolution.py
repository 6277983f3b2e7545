import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifford_stability.revolution import (
    GeometryError,
    Profile,
    clifford_profile,
    conformal_class,
    spectral_derivative,
    surface_data,
    willmore_energy,
)
from clifford_stability.torus import geometric_data, make_torus, willmore_energy_clifford


def _position(g, u, v):
    return np.array(
        [np.cos(g) * np.cos(u), np.cos(g) * np.sin(u), np.sin(g) * np.cos(v), np.sin(g) * np.sin(v)]
    )


def _cross4(a, b, c):
    """Vector orthogonal to a, b, c in R^4 (cofactor expansion)."""
    m = np.stack([a, b, c])
    out = np.empty(4)
    for i in range(4):
        minor = np.delete(m, i, axis=1)
        out[i] = (-1) ** i * np.linalg.det(minor)
    return out


def _reference_mean_curvature(gamma, v0, eps=1e-3):
    """Mean curvature by the 4D cross product and finite differences in v."""
    P = lambda u, v: _position(gamma(v), u, v)
    p = P(0.0, v0)
    du = (-P(2 * eps, v0) + 8 * P(eps, v0) - 8 * P(-eps, v0) + P(-2 * eps, v0)) / (12 * eps)
    dv = (-P(0, v0 + 2 * eps) + 8 * P(0, v0 + eps) - 8 * P(0, v0 - eps) + P(0, v0 - 2 * eps)) / (12 * eps)
    duu = (-P(2 * eps, v0) + 16 * P(eps, v0) - 30 * p + 16 * P(-eps, v0) - P(-2 * eps, v0)) / (12 * eps**2)
    dvv = (-P(0, v0 + 2 * eps) + 16 * P(0, v0 + eps) - 30 * p + 16 * P(0, v0 - eps) - P(0, v0 - 2 * eps)) / (12 * eps**2)
    n = _cross4(p, du, dv)
    n /= np.linalg.norm(n)
    E, G = du @ du, dv @ dv
    return n, (duu @ n) / E + (dvv @ n) / G


def _wavy(T, a=0.1, b=0.05):
    return lambda v: T.rho + a * np.sin(2 * v) + b * np.cos(3 * v)


@pytest.mark.parametrize("r", [0.35, 0.6, 0.8])
def test_mean_curvature_matches_independent_oracle(r):
    T = make_torus(r)
    gamma = _wavy(T)
    sd = surface_data(Profile.from_function(gamma, 128))
    for j in range(0, 128, 9):
        n_ref, h_ref = _reference_mean_curvature(gamma, sd.v[j])
        orient = np.sign(n_ref @ sd.normal[:, j])
        assert abs(abs(n_ref @ sd.normal[:, j]) - 1.0) < 1e-9
        assert sd.h[j] == pytest.approx(orient * h_ref, abs=1e-8)


@pytest.mark.parametrize("r", [0.2, 0.5, 1 / math.sqrt(2), 0.9])
def test_clifford_profile_geometry(r):
    T = make_torus(r)
    p = clifford_profile(T, 64)
    sd = surface_data(p)
    assert np.allclose(sd.h, geometric_data(T).h, rtol=1e-12, atol=1e-12)
    assert np.allclose(sd.A12, 0.0, atol=1e-14)
    assert willmore_energy(p) == pytest.approx(willmore_energy_clifford(T), rel=1e-12)
    assert conformal_class(p) == pytest.approx(T.b, rel=1e-12)


@pytest.mark.parametrize("r", [0.3, 0.7])
def test_frame_identities(r):
    T = make_torus(r)
    sd = surface_data(Profile.from_function(_wavy(T), 256))
    dot = lambda a, b: np.einsum("in,in->n", a, b)
    assert np.max(np.abs(dot(sd.position, sd.position) - 1.0)) < 1e-14
    assert np.max(np.abs(dot(sd.normal, sd.normal) - 1.0)) < 1e-12
    for w in (sd.position, sd.du, sd.dv):
        assert np.max(np.abs(dot(sd.normal, w))) < 1e-12
    assert np.max(np.abs(sd.F)) < 1e-15
    assert np.max(np.abs(dot(sd.du, sd.du) - sd.E)) < 1e-14
    assert np.max(np.abs(dot(sd.dv, sd.dv) - sd.G)) < 1e-12


def test_normal_orientation_agrees_with_seed_at_clifford():
    T = make_torus(0.45)
    sd = surface_data(clifford_profile(T, 16))
    # (sin rho e^{iu}, -cos rho e^{iv}) at u = 0
    expected = np.stack([np.full(16, T.s), np.zeros(16), -T.r * np.cos(sd.v), -T.r * np.sin(sd.v)])
    assert np.allclose(sd.normal, expected, atol=1e-15)


def test_quadrature_is_spectrally_converged():
    T = make_torus(0.55)
    gamma = lambda v: T.rho + 0.05 * np.sin(2 * v)
    w64 = willmore_energy(Profile.from_function(gamma, 64))
    w128 = willmore_energy(Profile.from_function(gamma, 128))
    assert abs(w64 - w128) < 1e-10
    c64 = conformal_class(Profile.from_function(gamma, 64))
    c128 = conformal_class(Profile.from_function(gamma, 128))
    assert abs(c64 - c128) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.3, max_value=0.85),
    st.floats(min_value=-0.1, max_value=0.1),
    st.floats(min_value=-0.1, max_value=0.1),
    st.integers(1, 5),
    st.integers(0, 63),
)
def test_energy_bounds_and_shift_invariance(r, a, b, l, shift):
    T = make_torus(r)
    p = Profile.from_function(lambda v: T.rho + a * np.sin(l * v) + b * np.cos(2 * v), 64)
    w = willmore_energy(p)
    # no torus in S^3 has energy below 2 pi^2
    assert w >= 2 * math.pi**2 * (1 - 1e-12)
    assert willmore_energy(p.shifted(shift)) == pytest.approx(w, rel=1e-12)
    assert conformal_class(p.shifted(shift)) == pytest.approx(conformal_class(p), rel=1e-12)


def test_spectral_derivative():
    v = 2 * math.pi * np.arange(32) / 32
    f = np.sin(3 * v) + 0.5 * np.cos(7 * v)
    assert np.allclose(spectral_derivative(f, 1), 3 * np.cos(3 * v) - 3.5 * np.sin(7 * v), atol=1e-12)
    assert np.allclose(spectral_derivative(f, 2), -9 * np.sin(3 * v) - 24.5 * np.cos(7 * v), atol=1e-11)


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(np.full(24, 0.5))
    with pytest.raises(ValueError):
        Profile(np.full(8, 0.5))
    with pytest.raises(GeometryError):
        Profile(np.full(16, 1.6))
    with pytest.raises(GeometryError):
        surface_data(Profile(np.full(16, 1e-8)))
    with pytest.raises(ValueError):
        clifford_profile(make_torus(0.5), 48)
    assert issubclass(GeometryError, ValueError)


def test_profile_is_immutable():
    p = clifford_profile(make_torus(0.5), 16)
    with pytest.raises(ValueError):
        p.values[0] = 0.3


def test_json_round_trip():
    T = make_torus(0.42)
    p = Profile.from_function(_wavy(T), 32)
    q = Profile.from_json(p.to_json())
    assert np.array_equal(p.values, q.values)
    bad = json.loads(p.to_json())
    bad["n"] = 16
    with pytest.raises(ValueError):
        Profile.from_json(json.dumps(bad))


def test_csv_export():
    sd = surface_data(clifford_profile(make_torus(0.6), 16))
    buf = io.StringIO()
    sd.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "v,gamma,E,G,h"
    assert len(lines) == 17
    first = [float(x) for x in lines[1].split(",")]
    assert first[1] == pytest.approx(math.acos(0.6), rel=1e-11)
    assert first[2] == pytest.approx(0.36, rel=1e-11)
