"""Exact big-integer tables for unicellular maps and triangulations.

Everything here is integer or rational arithmetic; floating point never
enters.  The tables are the ground truth that every asymptotic formula in
the package is measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from ._validation import check_nonnegative_int, check_positive_int
from .errors import DomainError, ExactDivisionError

try:  # GMP multiplication keeps the triangulation convolution tractable
    from gmpy2 import mpz as _bigint
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _bigint = int

UNICELLULAR = "unicellular"
TRIANGULATION = "triangulation"

#: Default triangulation seeds.  tau(0, 0) = 1 reproduces the planar counts
#: 1, 4, 32, 336, 4096, ... and an integral table; see ``planar_triangulations``.
DEFAULT_TRIANGULATION_SEEDS: Mapping[tuple[int, int], int] = {(0, 0): 1}


def double_factorial(n: int) -> int:
    """Return ``n!!``; by convention ``0!! = (-1)!! = 1``."""
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    if n <= 0:
        return 1
    return math.prod(range(n, 0, -2))


def catalan(n: int) -> int:
    n = check_nonnegative_int(n, "n")
    return math.comb(2 * n, n) // (n + 1)


def one_vertex_count(n: int) -> int:
    """``(2n)! / (2^n (n+1)!)``, the number of unicellular maps with one vertex (n even)."""
    n = check_nonnegative_int(n, "n")
    num = math.factorial(2 * n)
    den = 2**n * math.factorial(n + 1)
    q, r = divmod(num, den)
    if r:
        raise DomainError(f"(2n)!/(2^n (n+1)!) is not integral at n={n}")
    return q


def planar_triangulations(n: int) -> int:
    """Closed form ``2^(2n+1) (3n)!! / ((n+2)! n!!)`` for genus-0 triangulations."""
    n = check_nonnegative_int(n, "n")
    num = 2 ** (2 * n + 1) * double_factorial(3 * n)
    den = math.factorial(n + 2) * double_factorial(n)
    q, r = divmod(num, den)
    if r:
        raise DomainError(f"planar triangulation formula not integral at n={n}")
    return q


def _support_max_genus(kind, n):
    if kind == UNICELLULAR:
        return n // 2
    return (n + 1) // 2


@dataclass(frozen=True)
class ExactTriangle:
    """Immutable triangular table of exact counts.

    Row ``n`` stores the contiguous genus range ``[offsets[n], offsets[n] + len(rows[n]))``.
    A table built with a genus or vertex band stores only part of each row;
    reads inside the combinatorial support but outside the band raise
    ``KeyError`` instead of silently returning 0.
    """

    kind: str
    n_max: int
    rows: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]
    seeds: Mapping[tuple[int, int], int] | None = None
    validated: bool = True
    g_max: int | None = None
    v_max: int | None = None

    def in_support(self, n: int, g: int) -> bool:
        return n >= 0 and 0 <= g <= _support_max_genus(self.kind, n)

    def is_stored(self, n: int, g: int) -> bool:
        if not 0 <= n <= self.n_max:
            return False
        lo = self.offsets[n]
        return lo <= g < lo + len(self.rows[n])

    def value(self, n: int, g: int) -> int:
        if not self.in_support(n, g):
            return 0
        if n > self.n_max:
            raise KeyError(f"n={n} exceeds table n_max={self.n_max}")
        lo = self.offsets[n]
        idx = g - lo
        if not 0 <= idx < len(self.rows[n]):
            raise KeyError(f"(n, g)=({n}, {g}) lies outside the computed band")
        return self.rows[n][idx]

    def __getitem__(self, key):
        n, g = key
        return self.value(n, g)

    def __contains__(self, key):
        n, g = key
        return self.is_stored(n, g)

    def row(self, n: int) -> dict[int, int]:
        lo = self.offsets[n]
        return {lo + i: v for i, v in enumerate(self.rows[n])}

    def items(self) -> Iterator[tuple[int, int, int]]:
        for n, (lo, row) in enumerate(zip(self.offsets, self.rows)):
            for i, v in enumerate(row):
                yield n, lo + i, v

    def __len__(self):
        return sum(len(r) for r in self.rows)


def _band_range(n, g_max, v_max):
    hi = n // 2
    if g_max is not None:
        hi = min(hi, g_max)
    lo = 0
    if v_max is not None:
        lo = max(0, -((v_max - n) // 2))  # ceil((n - v_max) / 2)
    return lo, hi


def build_unicellular_table(n_max: int, *, g_max: int | None = None,
                            v_max: int | None = None) -> ExactTriangle:
    """Tabulate E(n, g) by the Harer-Zagier recurrence.

    ``(n+1) E(n,g) = 2(2n-1) E(n-1,g) + (n-1)(2n-1)(2n-3) E(n-2,g-1)``
    with ``E(0,0) = 1`` and ``E(n,g) = 0`` for ``g < 0`` or ``n < 2g``.

    Parameters
    ----------
    n_max : int
        Largest edge count.
    g_max : int, optional
        Keep only genera ``g <= g_max``.  The recurrence never raises the
        genus, so the band is self-contained.
    v_max : int, optional
        Keep only ``n - 2g <= v_max``.  The recurrence never raises
        ``n - 2g`` either, which makes near-diagonal tables at large ``n`` cheap.
    """
    n_max = check_nonnegative_int(n_max, "n_max")
    if g_max is not None:
        g_max = check_nonnegative_int(g_max, "g_max")
    if v_max is not None:
        v_max = check_nonnegative_int(v_max, "v_max")

    rows: list[tuple[int, ...]] = []
    offsets: list[int] = []

    def get(n, g):
        if n < 0 or g < 0 or 2 * g > n:
            return 0
        idx = g - offsets[n]
        row = rows[n]
        if 0 <= idx < len(row):
            return row[idx]
        raise AssertionError(f"band dependency ({n}, {g}) missing")  # band is closed

    for n in range(n_max + 1):
        lo, hi = _band_range(n, g_max, v_max)
        if n == 0:
            offsets.append(0)
            rows.append((1,))
            continue
        a = 2 * (2 * n - 1)
        b = (n - 1) * (2 * n - 1) * (2 * n - 3)
        row = []
        for g in range(lo, hi + 1):
            total = a * get(n - 1, g) + (b * get(n - 2, g - 1) if n >= 2 else 0)
            q, r = divmod(total, n + 1)
            if r:
                raise ExactDivisionError(
                    f"non-exact division at (n, g)=({n}, {g}); recurrence corrupted", n, g)
            row.append(q)
        offsets.append(lo)
        rows.append(tuple(row))
    return ExactTriangle(UNICELLULAR, n_max, tuple(rows), tuple(offsets),
                         g_max=g_max, v_max=v_max)


def _pack(coeffs, width):
    """Kronecker-pack nonnegative integers into one big integer, ``width`` bytes per slot."""
    data = b"".join(int(c).to_bytes(width, "little") for c in coeffs)
    return _bigint(int.from_bytes(data, "little"))


def _unpack(value, width, count):
    raw = int(value).to_bytes(width * count, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(count)]


def build_triangulation_table(n_max: int, seeds: Mapping[tuple[int, int], int] | None = None,
                              *, g_max: int | None = None) -> ExactTriangle:
    """Tabulate tau(n, g), rooted genus-g triangulations with 2n faces.

    Uses the quadratic recurrence

        (n+1) tau(n,g) = 4n(3n-2)(3n-4) tau(n-2,g-1) + 4(3n-1) tau(n-1,g)
                         + 4 sum_{i+j=n-2} sum_{g1+g2=g} (3i+2)(3j+2) tau(i,g1) tau(j,g2)
                         + 2 [n = g = 1]

    with ``tau = 0`` for negative arguments.  Entries listed in ``seeds``
    override the recurrence.  The convolution is done by Kronecker
    substitution, one big-integer product per pair ``i < j``.
    """
    n_max = check_nonnegative_int(n_max, "n_max")
    seeds = dict(DEFAULT_TRIANGULATION_SEEDS if seeds is None else seeds)
    for (n, g), val in seeds.items():
        if n < 0 or g < 0:
            raise DomainError(f"seed at ({n}, {g}) has a negative index")
        if int(val) != val or val < 0:
            raise DomainError(f"seed value at ({n}, {g}) must be a nonnegative integer")
    validated = seeds == dict(DEFAULT_TRIANGULATION_SEEDS)

    rows: list[list[int]] = []
    weighted: list[list[int]] = []  # (3i+2) * tau(i, g)

    def get(n, g):
        if n < 0 or g < 0 or g >= len(rows[n]):
            return 0
        return rows[n][g]

    for n in range(n_max + 1):
        hi = _support_max_genus(TRIANGULATION, n)
        if g_max is not None:
            hi = min(hi, g_max)
        conv = [0] * (hi + 1)
        if n >= 2:
            conv = _convolution(weighted, n - 2, hi)
        row = []
        for g in range(hi + 1):
            if (n, g) in seeds:
                row.append(int(seeds[(n, g)]))
                continue
            total = 4 * (3 * n - 1) * get(n - 1, g) + 4 * conv[g]
            if n >= 2 and g >= 1:
                total += 4 * n * (3 * n - 2) * (3 * n - 4) * get(n - 2, g - 1)
            if n == 1 and g == 1:
                total += 2
            q, r = divmod(total, n + 1)
            if r:
                raise ExactDivisionError(
                    f"non-exact division at (n, g)=({n}, {g}); seeds are inconsistent", n, g)
            row.append(q)
        rows.append(row)
        weighted.append([(3 * n + 2) * v for v in row])
    return ExactTriangle(TRIANGULATION, n_max, tuple(tuple(r) for r in rows),
                         tuple(0 for _ in rows), seeds=seeds, validated=validated,
                         g_max=g_max)


def _convolution(weighted, total_n, g_hi):
    """Coefficients y^0..y^g_hi of sum_{i+j=total_n} W_i(y) W_j(y)."""
    polys = weighted[:total_n + 1]
    biggest = max((c for p in polys for c in p), default=0)
    bits = 2 * biggest.bit_length() + (total_n + 1).bit_length() + (g_hi + 1).bit_length() + 2
    width = (bits + 7) // 8
    slots = g_hi + 1
    packed = [_pack(p[:slots], width) if p else _bigint(0) for p in polys]
    acc = _bigint(0)
    for i in range(total_n // 2 + 1):
        j = total_n - i
        prod = packed[i] * packed[j]
        acc += prod if i == j else 2 * prod
    count = max(slots, 1)
    nbytes = width * count
    acc_int = int(acc) & ((1 << (8 * nbytes)) - 1)
    return _unpack(acc_int, width, count)


@dataclass(frozen=True)
class SeriesOracle:
    """Exact expansion of ``((1+y)/(1-y))^x`` through ``y^y_order``.

    ``coefficients[k]`` is the coefficient of ``y^k`` as a list of Fractions
    indexed by the power of ``x``.
    """

    y_order: int
    coefficients: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def coefficient(self, k: int, j: int) -> Fraction:
        """Coefficient of ``x^j y^k``."""
        poly = self.coefficients[k]
        return poly[j] if 0 <= j < len(poly) else Fraction(0)

    def ode_residual(self) -> list[tuple[Fraction, ...]]:
        """Coefficientwise residual of ``(1-y^2) dE/dy - 2x E`` for ``y^0 .. y^(y_order-1)``.

        All entries are exactly zero for a correct expansion.
        """
        out = []
        for k in range(self.y_order):
            deg = k + 2
            res = [Fraction(0)] * deg
            for j in range(deg):
                val = (k + 1) * self.coefficient(k + 1, j)
                if k >= 1:
                    val -= (k - 1) * self.coefficient(k - 1, j)
                if j >= 1:
                    val -= 2 * self.coefficient(k, j - 1)
                res[j] = val
            out.append(tuple(res))
        return out

    def unicellular_counts(self) -> dict[tuple[int, int], int]:
        """Extract E(n, g) for ``n <= y_order - 1`` from the Harer-Zagier identity.

        ``[x^(n+1-2g) y^(n+1)] ((1+y)/(1-y))^x = 2 E(n,g) / (2n-1)!!``.
        """
        counts = {}
        for n in range(self.y_order):
            scale = Fraction(double_factorial(2 * n - 1), 2)
            for g in range(n // 2 + 1):
                val = scale * self.coefficient(n + 1, n + 1 - 2 * g)
                if val.denominator != 1:
                    raise ExactDivisionError(f"series coefficient not integral at ({n}, {g})", n, g)
                counts[(n, g)] = int(val)
        return counts


def series_oracle(y_order: int) -> SeriesOracle:
    """Expand ``exp(2x (y + y^3/3 + y^5/5 + ...))`` exactly up to ``y^y_order``.

    The exponential uses the generic power-series recurrence
    ``k e_k = sum_j j l_j e_(k-j)``; with ``l_j = 2x/j`` for odd ``j`` each
    term reduces to ``2x e_(k-j)``.
    """
    y_order = check_positive_int(y_order, "y_order")
    coeffs: list[list[Fraction]] = [[Fraction(1)]]
    for k in range(1, y_order + 1):
        acc = [Fraction(0)] * (k + 1)
        for j in range(1, k + 1, 2):
            for p, c in enumerate(coeffs[k - j]):
                if c:
                    acc[p + 1] += 2 * c
        coeffs.append([c / k for c in acc])
    return SeriesOracle(y_order, tuple(tuple(c) for c in coeffs))


def check_against_series(table: ExactTriangle, oracle: SeriesOracle) -> int:
    """Compare a unicellular table with the series extraction; return the number of entries checked.

    Raises ``AssertionError`` on the first mismatch.
    """
    counts = oracle.unicellular_counts()
    checked = 0
    for (n, g), val in counts.items():
        if n > table.n_max or not table.is_stored(n, g):
            continue
        if table.value(n, g) != val:
            raise AssertionError(f"series/recurrence mismatch at ({n}, {g}): "
                                 f"{val} != {table.value(n, g)}")
        checked += 1
    return checked
