import mpmath
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mapwalk.errors import DomainError
from mapwalk.exact import build_unicellular_table
from mapwalk.fit import (
    RayAsymptoticFit, fit_ray, guess_form, ode_residual_f, richardson, theory_constants,
)


def independent_constants(p, q):
    """mu and c from a fresh root solve of the forward map."""
    with mpmath.workdps(60):
        theta = mpmath.mpf(p) / q

        def forward(lam):
            s = mpmath.sqrt(1 - 4 * lam)
            return mpmath.mpf(1) / 2 - lam * mpmath.log((1 + s) / (1 - s)) / s - theta

        lam = mpmath.findroot(forward, (mpmath.mpf("1e-20"), mpmath.mpf("0.2499999")),
                              solver="anderson")
        f = (-theta * mpmath.log(1 - 4 * lam) - (1 - 2 * theta) * mpmath.log(lam)
             + 2 * (mpmath.log(2) - 1) * theta)
        J = mpmath.sqrt(2 / (lam * (1 - 2 * theta - 4 * lam + 4 * theta * lam)))
        r = mpmath.mpf(q) / p
        return float(r**2 * mpmath.exp(r * f)), float(J / (2 * mpmath.sqrt(2) * mpmath.pi * r**2))


def test_richardson_kills_polynomial_tail():
    ks = list(range(10, 20))
    seq = [mpmath.mpf(2) + mpmath.mpf(3) / k + mpmath.mpf(5) / k**2 for k in ks]
    assert abs(richardson(seq, ks, 2) - 2) < mpmath.mpf(10) ** -12
    assert abs(richardson(seq, ks, 0) - 2) > 0.1
    with pytest.raises(DomainError):
        richardson(seq[:2], ks[:2], 3)


@pytest.mark.parametrize("ray", ["1/3", "1/4"])
def test_theory_constants(ray):
    p, q = map(int, ray.split("/"))
    mu, c = theory_constants(ray)
    mu_ref, c_ref = independent_constants(p, q)
    assert mu == pytest.approx(mu_ref, rel=1e-12)
    assert c == pytest.approx(c_ref, rel=1e-12)


@pytest.mark.parametrize("ray", ["1/3", "1/4"])
def test_fit_reproduces_theory(uni1000, ray):
    res = fit_ray(uni1000, ray)
    mu, c = theory_constants(ray)
    assert res.growth_mu == pytest.approx(mu, rel=1e-9)
    assert res.constant_c == pytest.approx(c, rel=1e-6)
    assert res.residual_trace[-1] < res.residual_trace[0]
    assert res.to_dict()["ray"] == ray


def test_fit_needs_enough_points():
    small = build_unicellular_table(20)
    with pytest.raises(DomainError):
        fit_ray(small, "1/3")


def test_estimator(uni1000):
    est = RayAsymptoticFit(ray="1/3")
    with pytest.raises(NotFittedError):
        est.predict([10])
    est.fit(uni1000)
    assert clone(est).get_params() == {"ray": "1/3", "levels": 4, "precision": None}
    # the fitted form carries an O(1/g) relative correction
    errs = []
    for g in (100, 300):
        pred = est.predict([g])[0]
        errs.append(abs(pred - float(mpmath.log(uni1000.value(3 * g, g)))))
    assert errs[1] < errs[0] and errs[1] < 2 / 300
    with pytest.raises(DomainError):
        est.predict([0])


def test_functional_equation_residual():
    grid = [mpmath.mpf(k) / 40 for k in range(1, 20)]
    assert ode_residual_f(grid) < 1e-60
    assert ode_residual_f(grid, f_shift=1e-3) > 1e-4
    with pytest.raises(DomainError):
        ode_residual_f([0])


def test_guess_form_ray(uni1000):
    rep = guess_form(uni1000, "1/3")
    assert rep["a"] == pytest.approx(2, abs=1e-6)
    assert rep["b"] == pytest.approx(-2, abs=1e-5)
    assert rep["mu"] == pytest.approx(theory_constants("1/3")[0], rel=1e-6)


@pytest.mark.parametrize("g", [1, 3])
def test_guess_form_column(uni1000, g):
    rep = guess_form(uni1000, column=g)
    assert rep["growth"] == pytest.approx(4, rel=1e-9)
    assert rep["exponent"] == pytest.approx(3 * g - 1.5, abs=1e-6)


def test_guess_form_needs_one_mode(uni1000):
    with pytest.raises(DomainError):
        guess_form(uni1000)
    with pytest.raises(DomainError):
        guess_form(uni1000, "1/3", column=2)
