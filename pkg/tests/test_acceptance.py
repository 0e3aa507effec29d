"""Acceptance suite: one verdict line per criterion.

The lines are printed in the pytest terminal summary (and directly when this
file is run as a script).  Criteria 3 and 5 fail at these tolerances; they
are marked as strict expected failures, and the parts that do hold are
asserted separately.
"""

import pytest

from mapwalk.acceptance import AcceptanceConfig, overall, run_all

KNOWN_FAILURES = {
    3: "quoted constants c disagree with the closed form J/(2 sqrt(2) pi r^2) that the "
       "Richardson fit reproduces; mu agrees",
    5: "small-v Omega carries a 1 + O(v/log n) bias, so Q(2000) is about 1.65, not within 0.1",
}

LINES = []


@pytest.fixture(scope="module")
def results():
    res = {r.number: r for r in run_all(AcceptanceConfig())}
    LINES[:] = [r.line() for r in sorted(res.values(), key=lambda r: r.number)]
    return res


def _param(k):
    if k in KNOWN_FAILURES:
        return pytest.param(k, marks=pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[k]))
    return k


@pytest.mark.parametrize("number", [_param(k) for k in range(1, 11)])
def test_criterion(results, number):
    res = results[number]
    assert res.passed, res.line()


def test_every_criterion_reported(results):
    assert sorted(results) == list(range(1, 11))
    assert not results[10].gating
    assert overall(results.values()) is False  # 3 and 5 gate


def test_ray_growth_rates_and_constants(results):
    d = results[3].details
    for ray in ("1/3", "1/4"):
        assert d[ray]["mu_ok"]
        assert d[ray]["c_vs_theory_rel_err"] < 1e-6


def test_small_v_excess_is_explained_by_exact_extraction(results):
    rows = results[5].details["rows"]
    for r in rows:
        assert abs(r["exact_over_extraction"] - 1) < 1e-2
    assert abs(rows[-1]["exact_over_extraction"] - 1) < 1e-3
    # Q improves with n even though it is far from 1
    assert results[5].details["improving"]


def test_walk_run_is_reproducible(results):
    assert results[8].details["deterministic"] is True


if __name__ == "__main__":
    for r in run_all(AcceptanceConfig()):
        print(r.line())
