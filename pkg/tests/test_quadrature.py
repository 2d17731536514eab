from math import factorial, exp, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vdw_crossover.errors import AccuracyError, ConfigurationError
from vdw_crossover.quadrature import (QuadratureSettings, adaptive_gl, fixed_gl,
                                      gauss_legendre, integrate_semi_infinite, panel_nodes)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=20),
       st.floats(-3, 3), st.floats(0.1, 4))
def test_gauss_legendre_exact_for_polynomials(coeffs, a, width):
    # an n-point rule integrates degree 2n - 1 exactly
    b = a + width
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(b) - poly.integ()(a)
    got = fixed_gl(poly, a, b, 12)
    assert got == pytest.approx(exact, rel=1e-11, abs=1e-9)


def test_gauss_legendre_weights_sum_to_two():
    for n in (1, 5, 24, 64):
        x, w = gauss_legendre(n)
        assert w.sum() == pytest.approx(2.0, abs=1e-14)
        assert np.all(np.abs(x) < 1)


@pytest.mark.parametrize("n", [0, 1, 3, 7])
def test_semi_infinite_gamma_integrals(n):
    r = integrate_semi_infinite(lambda s: s**n * np.exp(-s))
    assert r.value == pytest.approx(factorial(n), rel=1e-12)


def test_semi_infinite_algebraic_tail():
    # int_0^inf dx / (1 + x^2) = pi / 2
    r = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x * x))
    assert r.value == pytest.approx(pi / 2, rel=1e-9)


def test_gamma_identity_23():
    r = integrate_semi_infinite(
        lambda s: np.exp(-s) * (s**4 / 8 + s**3 / 2 + 2.5 * s**2 + 6 * s + 6))
    assert abs(r.value - 23.0) <= 1e-12


def test_adaptive_handles_kink():
    r = adaptive_gl(lambda x: np.abs(x - 0.3), 0.0, 1.0)
    assert r.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), rel=1e-10)
    assert r.panels > 1


def test_adaptive_budget_exhaustion_raises():
    q = QuadratureSettings(max_panels=3, rel_tol=1e-12)
    with pytest.raises(AccuracyError):
        adaptive_gl(lambda x: np.sin(200 * x) ** 2 * np.sqrt(np.abs(x - 0.123)), 0.0, 1.0, q)


@pytest.mark.parametrize("kwargs", [
    {"rel_tol": 0.0}, {"rel_tol": 0.5}, {"abs_tol": -1.0},
    {"split_points": (1.0, 1.0)}, {"split_points": (5.0, 2.0)}, {"nodes": 0},
])
def test_settings_validation(kwargs):
    with pytest.raises(ConfigurationError):
        QuadratureSettings(**kwargs)


def test_panel_nodes_cover_interval():
    x, w = panel_nodes(np.array([0.0, 1.0, 3.0]), 8)
    assert w.sum() == pytest.approx(3.0)
    assert np.all((x > 0) & (x < 3))
