import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_stability.torus import (
    constrained_residual,
    geometric_data,
    isothermic_residual,
    make_torus,
    willmore_energy_clifford,
)

radii = st.floats(min_value=1e-3, max_value=1 - 1e-3)


def test_square_torus():
    T = make_torus(1 / math.sqrt(2))
    assert T.s == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert T.b == pytest.approx(1.0, abs=1e-15)
    assert T.rho == pytest.approx(math.pi / 4, abs=1e-15)


@pytest.mark.parametrize("r, b", [(0.5, math.sqrt(3)), (math.sqrt(3) / 2, 1 / math.sqrt(3))])
def test_stability_band_endpoints_in_b(r, b):
    assert make_torus(r).b == pytest.approx(b, rel=1e-15)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.2, 1.5, float("nan")])
def test_rejects_radius_outside_unit_interval(r):
    with pytest.raises(ValueError):
        make_torus(r)


@given(radii)
def test_parameter_invariants(r):
    T = make_torus(r)
    assert abs(T.r**2 + T.s**2 - 1) <= 1e-15
    assert T.b == T.s / T.r
    assert T.area == pytest.approx(4 * math.pi**2 * T.r * T.s, rel=1e-15)
    assert 0 < T.rho < math.pi / 2


def test_minimal_clifford_torus_has_no_mean_curvature():
    d = geometric_data(make_torus(1 / math.sqrt(2)))
    assert d.h == pytest.approx(0.0, abs=1e-15)
    assert d.wgrad == pytest.approx(0.0, abs=1e-15)


def test_mean_curvature_at_half():
    # (1/4 - 3/4) / (sqrt(3)/4)
    assert geometric_data(make_torus(0.5)).h == pytest.approx(-2 / math.sqrt(3), rel=1e-14)


@given(radii)
def test_geometric_data_coefficients(r):
    T = make_torus(r)
    d = geometric_data(T)
    s = T.s
    assert d.a12 == 0.0
    assert d.a11 == pytest.approx(-s / r, rel=1e-14)
    assert d.a22 == pytest.approx(r / s, rel=1e-14)
    assert d.h == pytest.approx(d.a11 + d.a22, rel=1e-9, abs=1e-12)
    assert abs(d.a11 - d.a22) / 2 == pytest.approx(d.atf, rel=1e-14)
    assert d.atf == pytest.approx(1 / (2 * r * s), rel=1e-14)


@given(st.floats(min_value=0.01, max_value=0.99))
def test_mean_curvature_flips_under_swap(r):
    T = make_torus(r)
    assert geometric_data(T).h == pytest.approx(-geometric_data(T.swapped()).h, rel=1e-12, abs=1e-12)


def test_energy_closed_form_values():
    assert willmore_energy_clifford(make_torus(1 / math.sqrt(2))) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert willmore_energy_clifford(make_torus(0.5)) == pytest.approx(4 * math.pi**2 / math.sqrt(3), rel=1e-15)


@given(radii)
def test_energy_matches_integrand_times_area(r):
    T = make_torus(r)
    d = geometric_data(T)
    assert willmore_energy_clifford(T) == pytest.approx((d.h**2 / 4 + 1) * T.area, rel=1e-12)


@given(st.floats(min_value=0.01, max_value=0.99))
def test_energy_symmetric_under_swap(r):
    T = make_torus(r)
    assert willmore_energy_clifford(T) == pytest.approx(willmore_energy_clifford(T.swapped()), rel=1e-12)


def test_energy_minimum_on_grid():
    rs = np.linspace(1e-3, 1 - 1e-3, 10_000)
    energies = np.array([willmore_energy_clifford(make_torus(r)) for r in rs])
    i = int(np.argmin(energies))
    assert abs(rs[i] - 1 / math.sqrt(2)) < 2 * (rs[1] - rs[0])
    assert energies.min() >= 2 * math.pi**2 - 1e-12
    assert energies.min() == pytest.approx(2 * math.pi**2, rel=1e-7)


@pytest.mark.parametrize("r", [1 / math.sqrt(2), 0.3, 0.9, 0.05, 0.999])
def test_constrained_equation_holds(r):
    T = make_torus(r)
    assert constrained_residual(T) <= 1e-14 * max(1.0, abs(geometric_data(T).wgrad))


@given(radii)
def test_isothermic_residual_vanishes(r):
    assert isothermic_residual(make_torus(r)) == 0.0
