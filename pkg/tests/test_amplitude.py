import math

import mpmath as mp
import numpy as np
import pytest

from chemolv.amplitude import (amplitude_coefficients, all_supercritical, bernoulli_solution,
                               pitchfork_scan, reconstruct_solution, solve_amplitude_ode,
                               steady_amplitude)
from chemolv.core import build_grid
from chemolv.errors import AmplitudeTooLarge, SubcriticalUnsupported, UnsupportedConfiguration
from chemolv.stability import growth_rate_sigma


def mp_coefficients(a, L, k):
    """Extended-precision evaluation of the coefficient formulas."""
    mp.mp.dps = 40
    a, L = mp.mpf(a), mp.mpf(L)
    w = k * mp.pi / L
    w2 = 2 * w
    lam = w ** 2
    chi = (1 + lam) / lam * (lam * (1 + a) + 1 - a)
    ub = 1 / (1 + a)
    c1 = chi * w ** 2 / (1 + w ** 2) + (a - 1) / 2
    c2 = c1 / (chi * ub * w2 ** 2 / (1 + w2 ** 2) + w2 ** 2 + 1)
    l1 = chi * ((a - 1 - c2) * w ** 2 / (2 * (1 + w ** 2))
                - c2 * w * w2 / (2 * (1 + w2 ** 2))) - (c2 + a - 1)
    l2 = ub * w ** 2 / (1 + w ** 2)
    return chi, c1, c2, l1, l2


@pytest.fixture(scope="module")
def coeffs():
    return amplitude_coefficients(0.2, 2.0)


def test_coefficients_examples(coeffs):
    assert coeffs.k_star == 1
    assert coeffs.c1 == pytest.approx(3.3609, abs=1e-4)
    # extended precision gives 0.2260378; the quoted 0.22605 is rounded loosely
    assert coeffs.c2 == pytest.approx(0.22605, abs=2e-5)
    assert coeffs.lambda1 == pytest.approx(-1.6267, abs=1e-4)
    assert coeffs.lambda2 == pytest.approx(0.59300, abs=1e-5)


@pytest.mark.parametrize("a,L", [(0.2, 2.0), (0.5, 3.0), (0.8, 1.0), (0.1, 30.0)])
def test_coefficients_match_extended_precision(a, L):
    c = amplitude_coefficients(a, L)
    chi, c1, c2, l1, l2 = mp_coefficients(a, L, c.k_star)
    for got, ref in ((c.chi_star, chi), (c.c1, c1), (c.c2, c2), (c.lambda1, l1), (c.lambda2, l2)):
        assert got == pytest.approx(float(ref), rel=1e-12, abs=1e-14)


def test_c1_limit_at_full_competition():
    c = amplitude_coefficients(0.999999, 2.0)
    assert c.c1 == pytest.approx(2 * c.w ** 2, rel=1e-5)


def test_tie_unsupported():
    # (1 + lam)(2 lam + ...) ties between k = 1 and k = 2 for a tuned L
    a = 0.2
    L = math.pi * math.sqrt(2) * (0.8 / 1.2) ** -0.25
    with pytest.raises(UnsupportedConfiguration):
        amplitude_coefficients(a, L)


def test_ode_zero_and_decay(coeffs):
    t, A = solve_amplitude_ode(coeffs, 0.05, 0.0, 10.0)
    assert np.all(A == 0)
    t, A = solve_amplitude_ode(coeffs, -0.05, 0.1, 50.0, dt_ode=1e-2)
    assert np.all(np.diff(A) < 0) and A[-1] > 0


def test_ode_matches_bernoulli(coeffs):
    t, A = solve_amplitude_ode(coeffs, 0.05, 1e-2, 200.0, dt_ode=1e-2)
    exact = bernoulli_solution(coeffs, 0.05, 1e-2, t)
    assert np.abs(A - exact).max() <= 1e-8
    _, A = solve_amplitude_ode(coeffs, 0.05, 1e-2, 400.0, dt_ode=1e-2)
    assert A[-1] == pytest.approx(0.13501, abs=1e-5)


def test_ode_negative_amplitude_symmetry(coeffs):
    _, Ap = solve_amplitude_ode(coeffs, 0.05, 1e-2, 20.0, dt_ode=1e-2)
    _, Am = solve_amplitude_ode(coeffs, 0.05, -1e-2, 20.0, dt_ode=1e-2)
    np.testing.assert_allclose(Am, -Ap, rtol=0, atol=0)


def test_steady_amplitude(coeffs):
    A = steady_amplitude(coeffs, 0.05)
    assert A == pytest.approx(0.13501, abs=1e-5)
    assert 0.05 * coeffs.lambda2 * A + coeffs.lambda1 * A ** 3 == pytest.approx(0, abs=1e-15)
    assert steady_amplitude(coeffs, -0.05) == 0.0
    assert steady_amplitude(coeffs, 0.0) == 0.0


def test_subcritical_raises(coeffs):
    from dataclasses import replace
    with pytest.raises(SubcriticalUnsupported):
        steady_amplitude(replace(coeffs, lambda1=0.3), 0.05)


def test_linear_rate_is_sigma(coeffs):
    assert 0.05 * coeffs.lambda2 == pytest.approx(growth_rate_sigma(0.05, 0.2, 2.0), rel=1e-14)


def test_reconstruct(coeffs):
    g = build_grid(2.0, 4)
    u, v = reconstruct_solution(coeffs, 0.1, g)
    cos = np.cos(np.pi * g.centers / 2)
    np.testing.assert_allclose(u.values, 5 / 6 + 0.1 * cos)
    np.testing.assert_allclose(u.values + v.values, 5 / 3)
    with pytest.raises(AmplitudeTooLarge):
        reconstruct_solution(coeffs, 1.0, g)


def test_pitchfork_scan_small():
    pts = pitchfork_scan(np.linspace(0.05, 0.95, 5), np.linspace(0.2, 4.0, 5))
    assert len(pts) == 25
    assert all_supercritical(pts)
