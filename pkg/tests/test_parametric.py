import mpmath
import numpy as np
import pytest

from mapwalk.errors import DomainError
from mapwalk.parametric import (
    f_of_theta, f_prime, f_second, high_genus_functions, j_log_prime, j_of_theta,
    k_factor, lambda_of_theta, parametric_arrays, parametric_point, series_large_theta,
    series_small_theta, theta_of_h, theta_of_lambda, triangulation_functions,
)

mp = mpmath.mpf


@pytest.fixture(autouse=True)
def high_precision():
    with mpmath.workprec(288):
        yield


def forward(lam):
    s = mpmath.sqrt(1 - 4 * lam)
    return mp(1) / 2 - lam * mpmath.log((1 + s) / (1 - s)) / s


def reference_lambda(theta):
    with mpmath.workdps(80):
        return mpmath.findroot(lambda x: forward(x) - theta, (mp("1e-30"), mp(1) / 4 - mp("1e-30")),
                               solver="anderson")


def reference_f(theta):
    lam = reference_lambda(theta)
    return (-theta * mpmath.log(1 - 4 * lam) - (1 - 2 * theta) * mpmath.log(lam)
            + 2 * (mpmath.log(2) - 1) * theta)


def test_forward_map_at_one_eighth():
    theta = theta_of_lambda(mp(1) / 8)
    hand = mp(1) / 2 - (mp("0.125") / mpmath.sqrt(mp("0.5"))) * mpmath.log(3 + 2 * mpmath.sqrt(2))
    assert abs(theta - hand) < mp(10) ** -70
    assert abs(float(theta) - 0.18838738) < 1e-8
    assert abs(lambda_of_theta(theta) - mp(1) / 8) < mp(10) ** -70


@pytest.mark.parametrize("theta", ["0.01", "0.1", "0.25", "0.4", "0.49"])
def test_inverse_against_independent_root(theta):
    theta = mp(theta)
    assert abs(lambda_of_theta(theta) - reference_lambda(theta)) < mp(10) ** -60


@pytest.mark.parametrize("lam", ["1e-40", "1e-5", "0.2", "0.2499999"])
def test_round_trip(lam):
    lam = mp(lam)
    assert abs(lambda_of_theta(theta_of_lambda(lam)) - lam) <= mp(10) ** -60 * max(lam, mp(1e-10))


def test_equation_residual():
    for theta in ["0.05", "0.2", "0.45"]:
        pt = parametric_point(mp(theta))
        res = 1 - 4 * pt.lam - 4 * pt.lam**2 * mpmath.exp(-pt.f_prime)
        assert abs(res) < mp(10) ** -60


def test_f_and_j_closed_forms():
    theta = mp("0.3")
    lam = reference_lambda(theta)
    assert abs(f_of_theta(theta) - reference_f(theta)) < mp(10) ** -60
    J = mpmath.sqrt(2 / (lam * (1 - 2 * theta - 4 * lam + 4 * theta * lam)))
    assert abs(j_of_theta(theta) / J - 1) < mp(10) ** -60


def test_endpoint_values():
    assert abs(f_of_theta(0) - mpmath.log(4)) < mp(10) ** -70
    assert abs(f_of_theta(mp(1) / 2) - (mpmath.log(2) - 1)) < mp(10) ** -70
    assert j_of_theta(0) == mpmath.inf
    assert parametric_point(mp(1) / 2).J == mpmath.inf


def central(fn, t, h, order=1):
    if order == 1:
        return (fn(t + h) - fn(t - h)) / (2 * h)
    return (fn(t + h) - 2 * fn(t) + fn(t - h)) / h**2


def richardson2(fn, t, h, order=1):
    # one Richardson step on a symmetric difference
    return (4 * central(fn, t, h / 2, order) - central(fn, t, h, order)) / 3


def test_derivatives_against_finite_differences():
    t = mp("0.2")
    assert abs(f_prime(t) / central(f_of_theta, t, mp("1e-25")) - 1) < 1e-30
    t = mp("0.25")
    assert abs(f_second(t) / richardson2(f_of_theta, t, mp("1e-6"), 2) - 1) < 1e-6
    t = mp("0.3")
    logJ = lambda x: mpmath.log(j_of_theta(x))
    assert abs(j_log_prime(t) / richardson2(logJ, t, mp("1e-6")) - 1) < 1e-6
    assert j_log_prime(mp("0.01")) < 0


def test_fprime_is_closed_form():
    pt = parametric_point(mp("0.17"))
    assert abs(pt.f_prime - mpmath.log(4 * pt.lam**2 / (1 - 4 * pt.lam))) < mp(10) ** -60


@pytest.mark.parametrize("bad", [-0.1, 0.6])
def test_domain(bad):
    with pytest.raises(DomainError):
        f_of_theta(bad)


def test_derivatives_refuse_endpoints():
    with pytest.raises(DomainError):
        f_prime(0)
    with pytest.raises(DomainError):
        f_second(mp(1) / 2)


def test_small_theta_series_orders():
    for t in ["0.01", "0.001"]:
        t = mp(t)
        s = series_small_theta(t)
        e = parametric_point(t, crossover=0)
        assert abs(s.lam - e.lam) < 2 * t ** mp(2.5)
        assert abs(s.f - e.f) < 5 * t**3
        assert abs(s.J - e.J) < 20 * t ** mp(1.5)
        assert abs(s.f_prime - e.f_prime) < 5 * t
    with pytest.raises(DomainError):
        series_small_theta(mp("0.3"))


def test_small_theta_f_quadratic_coefficient():
    # the theta^2 coefficient of f is -27/10: halving theta quarters the error
    # only with the minus sign
    t = mp("1e-4")
    e = parametric_point(t, crossover=0).f
    base = mpmath.log(4) - t * mpmath.log(t) + t - t * mpmath.log(12)
    assert abs((e - base) / t**2 + mp(27) / 10) < 1e-2


def test_large_theta_series():
    g = mp("1e-4")
    s = series_large_theta(gamma=g)
    e = parametric_point(gamma=g, crossover=0)
    assert abs(s.lam / e.lam - 1) < 1e-6
    assert abs(s.f_prime - (2 * mpmath.log(s.lam) + 2 * mpmath.log(2))) < 1e-60
    assert abs(e.f_prime - s.f_prime) < 10 * e.lam
    jlp = -1 / (e.lam * mpmath.log(e.lam))
    assert abs(e.J_log_prime / jlp - 1) < 0.2
    with pytest.raises(DomainError):
        series_large_theta(mp("0.1"))


def test_crossover_is_continuous():
    t = mp("0.9999e-4")
    below = parametric_point(t)
    exact = parametric_point(t, crossover=0)
    assert below.regime == "endpoint_small" and exact.regime == "interior"
    assert abs(below.f - exact.f) < 1e-11


def test_high_genus_identity_and_k():
    hp = high_genus_functions(mp("0.1"))
    assert abs(hp.identity_residual()) < mp(10) ** -60
    k1 = mpmath.sqrt(2 * mpmath.pi) / (mpmath.e * mpmath.gamma(mp(5) / 2))
    assert abs(k_factor(1) - k1) < mp(10) ** -60
    assert abs(float(k1) - 0.693680) < 1e-6
    assert high_genus_functions(mp("0.2"), k_arg=2).K == k_factor(2)
    with pytest.raises(DomainError):
        high_genus_functions(0)


def test_array_backend_matches_scalar():
    thetas = np.array([1e-3, 0.05, 0.2, 0.25, 0.3, 0.45, 0.499])
    arr = parametric_arrays(thetas)
    for i, t in enumerate(thetas):
        pt = parametric_point(mp(float(t)), crossover=0)
        assert abs(arr["lam"][i] / float(pt.lam) - 1) < 1e-12
        assert abs(arr["f"][i] - float(pt.f)) < 1e-12
        assert abs(arr["log_J"][i] - float(mpmath.log(pt.J))) < 1e-11


def test_triangulation_functions():
    for t in ["0.05", "0.25", "0.45"]:
        tp = triangulation_functions(mp(t))
        assert abs(theta_of_h(tp.h_tri) - mp(t)) < mp(10) ** -60
        assert tp.radicand > 0 and tp.J_tri > 0
    with pytest.raises(DomainError):
        triangulation_functions(mp("0.5"))
