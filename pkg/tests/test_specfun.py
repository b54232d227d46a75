import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperheat import specfun as sf
from hyperheat.errors import QuadratureError
from oracle_values import BESSEL_I, MCKEAN_INTEGRAL_1_1, PHI


def test_gamma_examples():
    assert sf.gamma_fn(1.0) == pytest.approx(1.0, rel=1e-13)
    assert sf.gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert sf.gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)
    with pytest.raises(ValueError):
        sf.gamma_fn(0.0)


def test_bessel_i_examples():
    assert sf.bessel_i(0.5, 1.0) == pytest.approx(BESSEL_I[(0.5, 1.0)], rel=1e-12)
    assert sf.bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1), rel=1e-12)
    assert sf.bessel_i(1.0, 0.0) == 0.0
    assert sf.bessel_i(0.0, 2.0) == pytest.approx(BESSEL_I[(0.0, 2.0)], rel=1e-12)
    assert sf.bessel_i(1.5, 50.0) == pytest.approx(BESSEL_I[(1.5, 50.0)], rel=1e-11)
    with pytest.raises(ValueError):
        sf.bessel_i(0.5, -1.0)


@given(st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 0.3, 1.7]), st.floats(0.0, 20.0))
def test_bessel_i_matches_series(nu, z):
    a = sf.bessel_i(nu, z)
    b = sf.bessel_i_series(nu, z)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-300)


def test_bessel_i_scaled_vectorised():
    z = np.array([0.0, 1e-3, 1.0, 30.0, 800.0])
    s = sf.bessel_i_scaled(1.0, z)
    assert s[0] == 0.0
    for zi, si in zip(z[1:4], s[1:4]):
        assert si == pytest.approx(sf.bessel_i_series(1.0, zi) * math.exp(-zi), rel=1e-12)
    # large-z asymptotics: e^{-z} I_nu(z) ~ 1/sqrt(2 pi z)
    assert s[4] * math.sqrt(2 * math.pi * 800) == pytest.approx(1 - 3 / (8 * 800), rel=1e-5)


def test_bessel_half_closed_form_grid():
    for z in np.geomspace(1e-3, 30, 60):
        closed = math.sqrt(2 / (math.pi * z)) * math.sinh(z)
        assert sf.bessel_i(0.5, z) == pytest.approx(closed, rel=1e-10)


def test_phi_examples():
    assert sf.phi(1.0) == pytest.approx(PHI[1.0], abs=1e-15)
    assert sf.phi(1e-3) == pytest.approx(PHI[1e-3], abs=1e-15)
    assert sf.phi(0.05) == pytest.approx(PHI[0.05], abs=1e-15)
    assert sf.phi(1e-8) == pytest.approx(-1 / 3, abs=1e-15)
    assert sf.phi(1e3) == pytest.approx(-1e-6, rel=1e-12)
    assert sf.phi_at(0.0) == -1 / 3
    with pytest.raises(ValueError):
        sf.phi(0.0)
    with pytest.raises(ValueError):
        sf.phi(-1.0)


def test_phi_monotone_and_bounded():
    x = np.geomspace(1e-6, 50, 4000)
    v = sf.phi(x)
    assert np.all(np.diff(v) >= 0)
    assert np.all(v >= -1 / 3) and np.all(v < 0)


def test_phi_branch_continuity():
    for b in (1e-2, 1.0):
        lo, hi = sf.phi(np.nextafter(b, 0)), sf.phi(np.nextafter(b, 2))
        assert abs(hi - lo) < 1e-15


def test_g_examples():
    assert np.all(sf.g_fn(3, np.array([0.1, 1.0, 7.0])) == 0)
    assert sf.g_fn(2, 1e-9) == pytest.approx(-1 / 24, abs=1e-15)
    assert sf.g_fn(5, 1e-9) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        sf.g_fn(2, 0.0)


@given(st.integers(2, 12), st.floats(1e-4, 40))
def test_g_bound(n, r):
    assert abs(sf.g_fn(n, r)) <= abs((n - 1) * (n - 3)) / 24 + 1e-15


def test_g_inverse_examples():
    assert sf.g_inverse(2, sf.g_fn(2, 1.7)) == pytest.approx(1.7, abs=1e-10)
    assert sf.g_inverse(5, sf.g_fn(5, 3.2)) == pytest.approx(3.2, abs=1e-10)
    near = sf.g_inverse(5, (1 / 3) * (1 - 1e-12))
    assert 0 < near < 1e-5
    with pytest.raises(ValueError):
        sf.g_inverse(3, 0.0)
    with pytest.raises(ValueError):
        sf.g_inverse(5, 0.5)
    with pytest.raises(ValueError):
        sf.g_inverse(2, 0.01)
    assert sf.g_inverse(5, 0.5, clip=True) == 0.0


@given(st.sampled_from([2, 4, 5, 6, 9]), st.floats(0.01, 30))
def test_g_inverse_residual(n, r):
    y = sf.g_fn(n, r)
    assert abs(sf.g_fn(n, sf.g_inverse(n, y)) - y) <= 1e-12


def test_integrate_examples():
    assert sf.integrate(np.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-12)
    v = sf.integrate(lambda x: np.exp(-x * x / 2), 0, math.inf,
                     envelope=lambda x: math.exp(-x * x / 2))
    assert v == pytest.approx(math.sqrt(math.pi / 2), rel=1e-11)


def test_integrate_mckean_shape():
    # xi = 1 + u^2 removes the endpoint singularity
    def f(u):
        u2 = u * u
        xi = 1 + u2
        den = np.sqrt(np.maximum(np.cosh(xi) - math.cosh(1.0), 1e-300))
        return np.where(u > 0, 2 * u * xi * np.exp(-xi * xi / 2) / den, 0.0)

    v = sf.integrate(f, 0, 6.0, sf.QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12))
    assert v == pytest.approx(MCKEAN_INTEGRAL_1_1, rel=1e-8)


def test_integrate_tanh_sinh_singular():
    spec = sf.QuadratureSpec(scheme="tanh_sinh", rel_tol=1e-12)
    assert sf.integrate(lambda x: 1 / np.sqrt(x), 0, 1, spec) == pytest.approx(2.0, rel=1e-10)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_integrate_linear(a, b):
    f, g = np.cos, lambda x: x * x
    lhs = sf.integrate(lambda x: a * f(x) + b * g(x), 0, 2)
    rhs = a * sf.integrate(f, 0, 2) + b * sf.integrate(g, 0, 2)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_integrate_errors():
    with pytest.raises(QuadratureError):
        sf.integrate(lambda x: np.full_like(x, np.nan), 0, 1)
    with pytest.raises(ValueError):
        sf.QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        sf.QuadratureSpec(max_panels=0)
    with pytest.raises(ValueError):
        sf.QuadratureSpec(scheme="simpson")


def test_integrate_panel_budget():
    spec = sf.QuadratureSpec(max_panels=2, rel_tol=1e-14, abs_tol=1e-16)
    with pytest.raises(QuadratureError):
        sf.integrate(lambda x: np.sin(200 * x) ** 2, 0, 10, spec)


def test_log_sinh_and_x_over_sinh():
    assert math.exp(sf.log_sinh(2.0)) / 2 == pytest.approx(math.sinh(2) / 2, rel=1e-15)
    assert sf.log_sinh(1000.0) == pytest.approx(1000 - math.log(2), rel=1e-15)
    assert sf.x_over_sinh(0.0) == 1.0
    assert sf.x_over_sinh(1e-300) == 1.0


def test_log_x_over_sinh():
    for x in (0.0, 1e-9, 0.5, 1.0, 3.0, 20.0):
        assert sf.log_x_over_sinh(x) == pytest.approx(math.log(sf.x_over_sinh(x)), rel=1e-14, abs=1e-300)
    assert sf.log_x_over_sinh(800.0) == pytest.approx(math.log(1600.0) - 800.0, rel=1e-15)
