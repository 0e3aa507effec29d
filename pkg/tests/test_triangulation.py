import math

import mpmath
import pytest

from mapwalk.errors import DomainError, NotValidatedError
from mapwalk.exact import build_triangulation_table, build_unicellular_table
from mapwalk.parametric import f_of_theta
from mapwalk.triangulation import (
    PREFACTOR_LOG, conjecture_ratio_trend, log_omega_triangulation, shape_comparison,
)


def test_prefactor():
    assert float(PREFACTOR_LOG) == pytest.approx(-math.log(4 * (3 * math.pi) ** 1.5), rel=1e-15)


def test_omega_domain():
    for n, g in ((10, 0), (10, 5), (0, 0)):
        with pytest.raises(DomainError):
            log_omega_triangulation(n, g)
    assert math.isfinite(float(log_omega_triangulation(40, 10)))


@pytest.mark.parametrize("ray", ["1/8", "1/4", "1/3"])
def test_ratio_moves_toward_one(tri120, ray):
    rep = conjecture_ratio_trend(tri120, ray)
    assert rep["tail_monotone_toward_one"]
    assert rep["ratios_monotone"]
    assert rep["within_tolerance"]
    assert 0.9 < rep["final_ratio"] < 1
    assert int(rep["points"][-1]["exact"]) == tri120.value(rep["points"][-1]["n"], rep["points"][-1]["g"])


def test_ratio_refuses_unvalidated_seeds():
    t = build_triangulation_table(40, {(0, 0): 1, (1, 0): 4})
    with pytest.raises(NotValidatedError):
        conjecture_ratio_trend(t, "1/4")


def test_ratio_refuses_other_inputs(tri120):
    with pytest.raises(DomainError):
        conjecture_ratio_trend(build_unicellular_table(40), "1/4")
    with pytest.raises(DomainError):
        conjecture_ratio_trend(build_triangulation_table(6), "1/4")


def test_shape_comparison():
    rep = shape_comparison(40, 10)
    assert rep["triangulation"]["n_exponent"] == 17.5
    assert rep["unicellular"]["n_exponent"] == 18
    assert rep["unicellular"]["f"] == pytest.approx(float(f_of_theta(mpmath.mpf(1) / 4)), rel=1e-14)
