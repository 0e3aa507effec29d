import math

import mpmath
import numpy as np
import pytest

from mapwalk.errors import DomainError
from mapwalk.exact import build_unicellular_table
from mapwalk.omega import (
    OmegaModel, log_exact, log_omega, log_omega_array, log_omega_tilde, q_ratio,
)

LARGE = OmegaModel("large_v")
SMALL = OmegaModel("small_v")


def test_genus_zero_closed_form():
    # Omega(n, 0) = 4^n / (sqrt(pi) n^(3/2))
    for n in (1, 10, 1000):
        ref = n * math.log(4) - 1.5 * math.log(n) - 0.5 * math.log(math.pi)
        assert abs(float(log_omega(LARGE, n, 0)) - ref) < 1e-12


def test_catalan_correction(uni1000):
    # C_n = 4^n / (sqrt(pi) n^(3/2)) (1 - 9/(8n) + 145/(128 n^2) + ...)
    n = 1000
    q = q_ratio(uni1000, LARGE, n, 0)
    assert abs(q - (1 - 9 / (8 * n) + 145 / (128 * n**2))) < 1e-8
    assert abs(q - 1) > 1e-3  # the 9/(8n) term is still visible at n = 1000


def test_one_vertex_closed_form():
    # Omega(n, n/2) = 2^n n! / (sqrt(pi) n^(3/2))
    for n in (2, 10, 500):
        ref = n * math.log(2) + math.lgamma(n + 1) - 1.5 * math.log(n) - 0.5 * math.log(math.pi)
        assert abs(float(log_omega(SMALL, n, n // 2)) / ref - 1) < 1e-13


def test_large_v_ray_converges(uni_full500):
    errs = [abs(q_ratio(uni_full500, LARGE, n, n // 4) - 1) for n in (100, 200, 400)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.01


def test_small_v_fixed_v_converges(uni_full500):
    errs = [abs(q_ratio(uni_full500, SMALL, n, n // 2) - 1) for n in (100, 200, 400)]
    assert errs[0] > errs[1] > errs[2]


def test_array_backend_matches_scalar():
    ns = np.array([10, 101, 500, 1000, 4000])
    for model, gs in ((LARGE, ns // 5), (SMALL, ns // 2 - 2), (OmegaModel("infinite_genus"), ns // 3)):
        arr = log_omega_array(model, ns, gs)
        for n, g, a in zip(ns, gs, arr):
            ref = float(log_omega(model, int(n), int(g)))
            assert abs(a - ref) <= 1e-12 * max(1.0, abs(ref))


def test_mid_needs_constant():
    with pytest.raises(DomainError):
        OmegaModel("mid_v")
    model = OmegaModel.parse("mid:2")
    assert model.regime == "mid_v" and model.c == 2.0
    with pytest.raises(DomainError):
        OmegaModel.parse("mid")


def test_parse_aliases_and_unknown():
    assert OmegaModel.parse("tri").regime == "triangulation"
    assert OmegaModel.parse("inf").regime == "infinite_genus"
    with pytest.raises(DomainError):
        OmegaModel.parse("medium")


def test_domains():
    assert LARGE.in_domain(10, 0) and not LARGE.in_domain(10, 5)
    assert SMALL.in_domain(10, 5)
    with pytest.raises(DomainError):
        log_omega(LARGE, 100, 80)
    with pytest.raises(DomainError):
        log_omega(SMALL, 10, 6)


def test_log_exact_huge_integers():
    val = 3**5000
    with mpmath.workprec(288):
        assert abs(log_exact(val) - 5000 * mpmath.log(3)) < mpmath.mpf(10) ** -60


def test_omega_tilde_large_v_limit(uni_full500):
    errs = []
    for n in (101, 201, 401):
        v = n // 10 + (n // 10 + n + 1) % 2
        g = (n + 1 - v) // 2
        q = float(mpmath.exp(log_exact(uni_full500.value(n, g)) - log_omega_tilde(n, v)))
        errs.append(abs(q - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.02


def test_omega_tilde_fixed_v():
    # with v fixed the ratio settles near 1 - 1/(2v) rather than 1
    t = build_unicellular_table(401, v_max=12)
    for v in (6, 12):
        g = (402 - v) // 2
        q = float(mpmath.exp(log_exact(t.value(401, g)) - log_omega_tilde(401, v)))
        assert abs(q - (1 - 1 / (2 * v))) < 0.01


def test_omega_tilde_rejects_bad_v():
    with pytest.raises(DomainError):
        log_omega_tilde(100, 1)
    with pytest.raises(DomainError):
        log_omega_tilde(100, 4)
