import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.special import digamma

from mapwalk.errors import ConvergenceError, DomainError
from mapwalk.exact import build_unicellular_table
from mapwalk.saddle import (
    SaddleConfig, _reflection_residual, cauchy_estimate, complex_gamma, contour_xm,
    large_powers_estimate, mid_regime_report, rgamma, saddle_maximizer, taylor_xm,
    y_coefficient_asymptotic, y_coefficient_exact,
)


def test_gamma_special_values():
    assert complex_gamma(2.5) == pytest.approx(3 * math.sqrt(math.pi) / 4, rel=1e-14)
    assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert complex_gamma(6) == pytest.approx(120, rel=1e-14)
    assert rgamma(-3) == 0 and rgamma(0) == 0
    assert math.isinf(abs(complex_gamma(-2)))


def test_gamma_against_mpmath():
    rng = np.random.default_rng(5)
    z = rng.uniform(-20, 20, 400) + 1j * rng.uniform(-20, 20, 400)
    z = z[np.abs(z) <= 20]
    ours = complex_gamma(z)
    for zi, gi in zip(z, ours):
        ref = complex(mpmath.gamma(mpmath.mpc(zi.real, zi.imag)))
        assert abs(gi / ref - 1) < 1e-12


def test_reflection():
    for z in (0.3 + 0.2j, -4.7 + 1j, 7.1 - 3j):
        assert _reflection_residual(z) < 1e-12


def test_exact_y_coefficients():
    # ((1+y)/(1-y))^1 = 1 + 2y + 2y^2 + ..., and the square has 4k at y^k
    assert y_coefficient_exact(10, 1) == 2
    assert y_coefficient_exact(10, 2) == 44
    # (1+y)/sqrt(1-y^2) = (1+y)(1 + y^2/2 + 3y^4/8 + ...)
    assert y_coefficient_exact(3, Fraction(1, 2)) == Fraction(3, 8)
    assert y_coefficient_asymptotic(10, 1) == pytest.approx(2.0, rel=1e-13)


def test_y_coefficient_asymptotic_half():
    exact = float(y_coefficient_exact(200, Fraction(1, 2)))
    assert y_coefficient_asymptotic(200, 0.5) == pytest.approx(exact, rel=5e-3)


@pytest.mark.parametrize("n,m", [(500, 7), (50, 3), (2000, 12)])
def test_contour_matches_taylor(n, m):
    assert contour_xm(n, m) == pytest.approx(float(taylor_xm(n, m)), rel=1e-8)


def test_contour_known_value():
    assert contour_xm(500, 7) == pytest.approx(165.696199253441, rel=1e-10)


def test_contour_is_radius_independent():
    a = contour_xm(500, 7)
    b = contour_xm(500, 7, radius=3.0)
    assert a == pytest.approx(b, rel=1e-8)
    rep = contour_xm(500, 7, report=True)
    assert rep["history"][-1][1] == rep["value"]


def test_contour_refuses_when_budget_too_small():
    cfg = SaddleConfig.for_point(500, 7, max_points=4096)
    with pytest.raises(ConvergenceError):
        contour_xm(500, 7, cfg)
    with pytest.raises(DomainError):
        SaddleConfig(10, 2, 1.0, 2.0)


@pytest.mark.parametrize("m", [10, 20, 40])
def test_large_powers_estimate(m):
    n = 10**6
    assert large_powers_estimate(n, m) == pytest.approx(contour_xm(n, m), rel=0.05)


def test_saddle_maximizer_is_a_root():
    n, m = 10**6, 20
    x = saddle_maximizer(n, m)
    assert abs(math.log(2 * n) - digamma(x) - (m + 1) / x) < 1e-10
    assert 0.8 < x / (m / math.log(n)) < 1.2


def test_cauchy_estimate_reproduces_small_v():
    t = build_unicellular_table(400, v_max=8)
    for g in (197, 198):
        ratio = math.exp(math.log(t.value(400, g)) - cauchy_estimate(400, g))
        assert abs(ratio - 1) < 2e-3


def test_mid_regime_report_keys():
    rep = mid_regime_report(300, 140, 1.5)
    assert rep["v"] == 20 and "log_estimate" in rep and "exact" not in rep
    with pytest.raises(DomainError):
        mid_regime_report(300, 140, 0.0)
