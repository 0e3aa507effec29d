from fractions import Fraction
from math import comb, factorial

import pytest

from mapwalk.errors import DomainError, ExactDivisionError
from mapwalk.exact import (
    build_triangulation_table, build_unicellular_table, catalan, check_against_series,
    double_factorial, one_vertex_count, planar_triangulations, series_oracle,
)


def naive_hz(n_max):
    """Plain dict recurrence, no banding or packing."""
    E = {(0, 0): 1}
    get = lambda n, g: E.get((n, g), 0)
    for n in range(1, n_max + 1):
        for g in range(0, n // 2 + 1):
            total = 2 * (2 * n - 1) * get(n - 1, g)
            if n >= 2 and g >= 1:
                total += (n - 1) * (2 * n - 1) * (2 * n - 3) * get(n - 2, g - 1)
            q = Fraction(total, n + 1)
            assert q.denominator == 1
            E[(n, g)] = int(q)
    return E


def test_small_rows_known_values(uni200):
    assert uni200.row(4) == {0: 14, 1: 70, 2: 21}
    assert uni200.row(5) == {0: 42, 1: 420, 2: 483}
    assert uni200.value(10, 5) == 59520825
    assert uni200.value(0, 0) == 1


def test_matches_plain_recurrence(uni200):
    ref = naive_hz(80)
    for (n, g), val in ref.items():
        assert uni200.value(n, g) == val


def test_row_sums_and_edges(uni200):
    for n in range(1, 201):
        row = uni200.row(n)
        assert sum(row.values()) == double_factorial(2 * n - 1)
        assert row[0] == catalan(n)
    for g in range(1, 100):
        # one vertex maps: (2n)! / (2^n (n+1)!) at n = 2g
        n = 2 * g
        expected = factorial(2 * n) // (2**n * factorial(n + 1))
        assert one_vertex_count(n) == expected == uni200.value(n, g)


def test_helpers():
    assert double_factorial(-1) == 1
    assert double_factorial(9) == 945
    assert [catalan(n) for n in range(6)] == [1, 1, 2, 5, 14, 42]
    assert catalan(30) == comb(60, 30) // 31


def test_support_and_band_lookups(uni200):
    assert uni200.value(10, 6) == 0
    assert not uni200.in_support(10, 6)
    assert (10, 5) in uni200
    with pytest.raises(KeyError):
        uni200.value(201, 0)


def test_genus_band_agrees_with_full(uni200):
    band = build_unicellular_table(200, g_max=6)
    for n, g, val in band.items():
        assert uni200.value(n, g) == val
    with pytest.raises(KeyError):
        band.value(100, 7)
    assert band.value(5, 3) == 0


def test_vertex_band_agrees_with_full(uni200):
    band = build_unicellular_table(200, v_max=9)
    count = 0
    for n, g, val in band.items():
        assert n - 2 * g <= 9
        assert uni200.value(n, g) == val
        count += 1
    assert count > 500
    with pytest.raises(KeyError):
        band.value(100, 10)


@pytest.mark.parametrize("bad", [-1, 2.5, True, "3"])
def test_rejects_bad_sizes(bad):
    with pytest.raises((DomainError, TypeError)):
        build_unicellular_table(bad)


def test_series_oracle_ode_and_table():
    oracle = series_oracle(21)
    assert all(all(c == 0 for c in row) for row in oracle.ode_residual())
    # y^1 coefficient of ((1+y)/(1-y))^x is 2x
    assert oracle.coefficient(1, 1) == 2
    table = build_unicellular_table(60)
    assert check_against_series(table, oracle) > 50


def test_series_oracle_wide(uni_full500):
    assert check_against_series(uni_full500, series_oracle(61)) == 961


def test_triangulation_genus_zero_and_known_values(tri120):
    for n in range(0, 121):
        assert tri120.value(n, 0) == planar_triangulations(n)
    assert [planar_triangulations(n) for n in range(6)] == [1, 4, 32, 336, 4096, 54912]
    assert [tri120.value(n, 1) for n in range(1, 5)] == [1, 28, 664, 14912]
    assert [tri120.value(n, 2) for n in range(3, 6)] == [105, 8112, 396792]
    assert tri120.validated


def test_triangulation_closed_form_planar():
    for n in range(30):
        assert planar_triangulations(n) == 2 ** (2 * n + 1) * double_factorial(3 * n) // (
            factorial(n + 2) * double_factorial(n))


def test_triangulation_genus_cap(tri120):
    capped = build_triangulation_table(60, g_max=3)
    for n, g, val in capped.items():
        assert tri120.value(n, g) == val


@pytest.mark.parametrize("seeds", [{(0, 0): 2}, {(0, 0): 0}, {(0, 0): 1, (1, 1): 2}])
def test_inconsistent_seeds_fail_loudly(seeds):
    with pytest.raises(ExactDivisionError):
        build_triangulation_table(10, seeds)


def test_nondefault_seeds_are_flagged():
    t = build_triangulation_table(10, {(0, 0): 1, (1, 0): 4})
    assert not t.validated
    assert t.value(3, 1) == 664


def test_exact_str_has_no_digit_limit():
    from mapwalk._validation import exact_str

    assert exact_str(10**5000) == "1" + "0" * 5000
    assert exact_str(-12) == "-12"
