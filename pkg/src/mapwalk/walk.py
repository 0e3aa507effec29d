"""Recurrences as random walks: condition checkers, Monte Carlo, sandwich bounds.

A linear recurrence ``E(n,g) = sum_{(i,j) in S} P_ij(n) E(n-i, g-j)`` divided
by a guessed approximant Omega becomes ``Q(n,g) = sum alpha_ij(n,g) Q(n-i,g-j)``
with ``alpha_ij = P_ij(n) Omega(n-i,g-j) / Omega(n,g)``.  Normalising the
alphas gives transition probabilities of a walk stopped on two boundaries.
This module evaluates the hypotheses of the resulting transfer theorem on
finite grids and runs the walk against exact tables.

All grid work is float64 in log space.  Grids are enumerated inside
``0 <= g <= n/2 + 1``, which contains every walk shipped here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._validation import check_nonnegative_int, check_positive_int
from .errors import ClosureViolation, DomainError, SandwichViolation
from .omega import OmegaModel, log_omega_array

__all__ = [
    "WalkSpec", "ErrorProducts", "WalkRunStats",
    "hz_prefactor", "hz_large_v_spec", "hz_small_v_spec", "omega_log_fn", "exact_log_fn",
    "level_of", "enumerate_points", "alpha_weights", "alpha_array",
    "check_condition_probabilities", "s_ratio", "s_array", "shifted_boundaries",
    "check_condition_s", "check_start_sequence", "check_boundary_values",
    "validate_spec", "error_products", "simulate_walk", "verify_sandwich",
    "supermartingale_check", "small_v_bad_genus", "large_v_bad_genus",
]

C_MINUS = "C_minus"
C_PLUS = "C_plus"
LEVEL_SUM = "n_plus_g"
LEVEL_DIFF = "n_minus_g"


@dataclass(frozen=True)
class WalkSpec:
    """A recurrence-as-walk description.

    Predicates and ``log_omega`` take integer numpy arrays ``(n, g)`` and
    return arrays.  ``prefactor(i, j, n)`` returns ``P_ij(n)`` as floats.
    ``level`` picks the level lines: ``n_plus_g`` (the general setting) or
    ``n_minus_g`` (the Harer-Zagier walk, where it drops by exactly one per
    step).
    """

    steps: tuple[tuple[int, int], ...]
    prefactor: Callable[[int, int, np.ndarray], np.ndarray]
    log_omega: Callable[[np.ndarray, np.ndarray], np.ndarray]
    inner: Callable[[np.ndarray, np.ndarray], np.ndarray]
    good: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bad: Callable[[np.ndarray, np.ndarray], np.ndarray]
    orientation: str = C_MINUS
    level: str = LEVEL_SUM
    name: str = "custom"
    residual_weight: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    omega_model: OmegaModel | None = None

    def __post_init__(self):
        steps = tuple((int(i), int(j)) for i, j in self.steps)
        if not steps:
            raise DomainError("step set must be non-empty")
        for i, j in steps:
            if i < 0 or j < 0 or (i, j) == (0, 0):
                raise DomainError(f"step ({i}, {j}) must lie in N x N minus the origin")
        object.__setattr__(self, "steps", steps)
        if self.orientation not in (C_MINUS, C_PLUS):
            raise DomainError(f"orientation must be {C_MINUS} or {C_PLUS}")
        if self.level not in (LEVEL_SUM, LEVEL_DIFF):
            raise DomainError(f"level must be {LEVEL_SUM} or {LEVEL_DIFF}")
        if self.level == LEVEL_DIFF and any(i - j < 1 for i, j in steps):
            raise DomainError("n - g levels need every step to lower n - g")

    @property
    def unit_level_steps(self) -> bool:
        """True when every step lowers the level by exactly one."""
        if self.level == LEVEL_DIFF:
            return all(i - j == 1 for i, j in self.steps)
        return all(i + j == 1 for i, j in self.steps)

    def weight(self, n, g):
        if self.residual_weight is not None:
            return self.residual_weight(n, g)
        m = (np.asarray(n) - np.asarray(g)).astype(float)
        return m * np.log(np.maximum(m, 2.0)) ** 2


def level_of(spec: WalkSpec, n, g):
    n = np.asarray(n)
    g = np.asarray(g)
    return n - g if spec.level == LEVEL_DIFF else n + g


# ------------------------------------------------------------------ HZ wiring

def hz_prefactor(i: int, j: int, n):
    """Harer-Zagier prefactors: ``2(2n-1)/(n+1)`` for (1,0), ``(n-1)(2n-1)(2n-3)/(n+1)`` for (2,1)."""
    n = np.asarray(n, dtype=float)
    if (i, j) == (1, 0):
        return 2 * (2 * n - 1) / (n + 1)
    if (i, j) == (2, 1):
        return (n - 1) * (2 * n - 1) * (2 * n - 3) / (n + 1)
    raise DomainError(f"({i}, {j}) is not a Harer-Zagier step")


def omega_log_fn(model: OmegaModel):
    def fn(n, g):
        return log_omega_array(model, n, g)
    return fn


def exact_log_fn(table):
    """log E from an exact table as a vectorised callable; makes every A(n, g) equal 1."""
    def fn(n, g):
        n = np.asarray(n)
        g = np.asarray(g)
        out = np.empty(n.shape, dtype=float)
        for idx in np.ndindex(n.shape):
            val = table.value(int(n[idx]), int(g[idx]))
            if val <= 0:
                raise DomainError(f"E({n[idx]}, {g[idx]}) = 0 has no logarithm")
            out[idx] = math.log(val)
        return out
    return fn


def large_v_bad_genus(n):
    """``ceil((n - 1)/2)``."""
    n = np.asarray(n)
    return n // 2


def small_v_bad_genus(n):
    """``ceil((n - log(n)^(4/3)) / 2)``, defined for n >= 2."""
    nf = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ell = np.where(nf >= 2, np.log(np.maximum(nf, 1.0)) ** (4.0 / 3.0), 0.0)
    return np.ceil((nf - ell) / 2 - 1e-12).astype(np.int64)


def hz_large_v_spec(precision: int | None = None) -> WalkSpec:
    """Walk for ``n - 2g`` large: good boundary g = 0, bad boundary g = ceil((n-1)/2).

    ``(1, 0)`` is a bad point only for ``g >= 1`` so the two boundaries stay
    disjoint at n = 1.  Bad points actually reached satisfy ``n = 2g + 1``.
    """
    model = OmegaModel("large_v", precision=precision)

    def good(n, g):
        return np.asarray(g) == 0

    def bad(n, g):
        g = np.asarray(g)
        return (g == large_v_bad_genus(n)) & (g >= 1)

    def inner(n, g):
        g = np.asarray(g)
        return (g >= 1) & (g < large_v_bad_genus(n))

    return WalkSpec(((1, 0), (2, 1)), hz_prefactor, omega_log_fn(model), inner, good, bad,
                    orientation=C_MINUS, level=LEVEL_DIFF, name="hz_large_v", omega_model=model)


def hz_small_v_spec(precision: int | None = None) -> WalkSpec:
    """Walk for ``n - 2g`` small: good boundary g = n/2 (even n), bad g = ceil((n - log^(4/3) n)/2).

    A bad point must also satisfy ``2g < n``; for n <= 5 the bad formula
    lands on the good boundary and is dropped there.  No inner points exist
    for n <= 10.
    """
    model = OmegaModel("small_v", precision=precision)

    def good(n, g):
        return 2 * np.asarray(g) == np.asarray(n)

    def bad(n, g):
        n = np.asarray(n)
        g = np.asarray(g)
        return (n >= 2) & (g == small_v_bad_genus(n)) & (2 * g < n)

    def inner(n, g):
        n = np.asarray(n)
        g = np.asarray(g)
        return (n >= 2) & (g > small_v_bad_genus(n)) & (2 * g < n)

    return WalkSpec(((1, 0), (2, 1)), hz_prefactor, omega_log_fn(model), inner, good, bad,
                    orientation=C_PLUS, level=LEVEL_DIFF, name="hz_small_v", omega_model=model)


# ------------------------------------------------------------------ grids

def enumerate_points(spec: WalkSpec, m_max: int, which: str = "inner", m_min: int = 0):
    """All points of kind ``which`` (inner, good, bad) with ``m_min <= level <= m_max``."""
    m_max = check_nonnegative_int(m_max, "m_max")
    n_top = m_max if spec.level == LEVEL_SUM else 2 * m_max + 2
    ns, gs = [], []
    pred = {"inner": spec.inner, "good": spec.good, "bad": spec.bad}[which]
    chunk = 512
    for start in range(0, n_top + 1, chunk):
        n_vals = np.arange(start, min(start + chunk, n_top + 1))
        g_top = n_vals[-1] // 2 + 1
        N, G = np.meshgrid(n_vals, np.arange(g_top + 1), indexing="ij")
        N = N.ravel()
        G = G.ravel()
        keep = G <= N // 2 + 1
        N, G = N[keep], G[keep]
        lv = level_of(spec, N, G)
        keep = (lv <= m_max) & (lv >= m_min)
        N, G = N[keep], G[keep]
        mask = pred(N, G)
        ns.append(N[mask])
        gs.append(G[mask])
    n = np.concatenate(ns).astype(np.int64)
    g = np.concatenate(gs).astype(np.int64)
    order = np.lexsort((g, n))
    return n[order], g[order]


def alpha_array(spec: WalkSpec, n, g) -> np.ndarray:
    """Array of shape ``(len(n), len(steps))`` of alpha_ij(n, g)."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    g = np.atleast_1d(np.asarray(g, dtype=np.int64))
    base = spec.log_omega(n, g)
    out = np.empty((n.size, len(spec.steps)))
    for k, (i, j) in enumerate(spec.steps):
        target = spec.log_omega(n - i, g - j)
        out[:, k] = spec.prefactor(i, j, n) * np.exp(target - base)
    return out


def alpha_weights(spec: WalkSpec, n: int, g: int) -> dict[tuple[int, int], float]:
    """alpha_ij at one inner point, keyed by step."""
    if not bool(spec.inner(np.array([n]), np.array([g]))[0]):
        raise DomainError(f"({n}, {g}) is not an inner point of {spec.name}")
    row = alpha_array(spec, [n], [g])[0]
    return {step: float(v) for step, v in zip(spec.steps, row)}


def _dyadic_summary(levels, values, burn_in):
    """Max of ``values`` over dyadic blocks [2^k, 2^(k+1)) of ``levels``."""
    blocks = {}
    for m, v in zip(levels, values):
        if m < 1:
            continue
        k = int(m).bit_length() - 1
        blocks[k] = max(blocks.get(k, 0.0), float(v))
    keys = sorted(blocks)
    tail = [blocks[k] for k in keys if 2**k >= burn_in]
    non_increasing = all(b <= a * (1 + 1e-9) for a, b in zip(tail, tail[1:]))
    return [{"block_start": 2**k, "max": blocks[k]} for k in keys], non_increasing


def check_condition_probabilities(spec: WalkSpec, grid=None, *, m_max: int | None = None,
                                  burn_in: int = 16, complete_levels: int | None = None) -> dict:
    """Condition 1: how close ``A = sum alpha`` is to 1, per level line.

    ``D(m) = max over I(m) of |A - 1| * weight``, where the weight defaults
    to ``(n - g) log^2 (n - g)``.  ``grid`` is an ``(n, g)`` pair of arrays
    (defaults to all inner points up to level ``m_max``).  Dyadic block
    maxima beyond ``burn_in`` should not increase.  Levels above
    ``complete_levels`` are excluded from the summary.
    """
    if grid is None:
        if m_max is None:
            raise DomainError("give either a grid or m_max")
        grid = enumerate_points(spec, m_max)
    n, g = (np.asarray(a, dtype=np.int64) for a in grid)
    if n.size == 0:
        return {"levels": [], "D": [], "sup_abs_residual": 0.0, "dyadic": [],
                "non_increasing": True, "points": 0}
    A = alpha_array(spec, n, g).sum(axis=1)
    resid = np.abs(A - 1) * spec.weight(n, g)
    lv = level_of(spec, n, g)
    if complete_levels is not None:
        keep = lv <= complete_levels
        lv, resid, A = lv[keep], resid[keep], A[keep]
    uniq = np.unique(lv)
    D = np.full(uniq.shape, 0.0)
    np.maximum.at(D, np.searchsorted(uniq, lv), resid)
    dyadic, ok = _dyadic_summary(uniq, D, burn_in)
    return {"levels": uniq.tolist(), "D": D.tolist(),
            "sup_abs_residual": float(np.max(np.abs(A - 1))) if A.size else 0.0,
            "dyadic": dyadic, "non_increasing": ok, "points": int(n.size)}


# ------------------------------------------------------------------ s ratio

def _s_offset(spec):
    return -1 if spec.orientation == C_MINUS else 1


def s_array(spec: WalkSpec, n, g) -> np.ndarray:
    """``s = Omega(n, g -+ 1) / Omega(n, g)``, with the sign fixed by the orientation.

    When ``(n, g -+ 1)`` falls outside the combinatorial support (``2g > n``)
    the numerator is an empty count and s is 0.
    """
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    g = np.atleast_1d(np.asarray(g, dtype=np.int64))
    g2 = g + _s_offset(spec)
    out = np.zeros(n.shape)
    live = (g2 >= 0) & (2 * g2 <= n)
    if np.any(live):
        out[live] = np.exp(spec.log_omega(n[live], g2[live]) - spec.log_omega(n[live], g[live]))
    return out


def s_ratio(spec: WalkSpec, n: int, g: int) -> float:
    if spec.omega_model is not None and not spec.omega_model.in_domain(n, g):
        raise DomainError(f"({n}, {g}) outside the {spec.omega_model.regime} domain")
    return float(s_array(spec, [n], [g])[0])


def shifted_boundaries(spec: WalkSpec, m_max: int, mode: str = "step"):
    """Inner points next to a boundary.

    ``mode='step'``: one step of the walk lands on the boundary (general
    definition).  ``mode='same_n'``: the neighbour at the same n and genus
    one closer to the boundary is on it (the table definition
    ``good(n) +- 1`` / ``bad(n) -+ 1``).
    Returns ``{'good': (n, g), 'bad': (n, g)}``.
    """
    n, g = enumerate_points(spec, m_max)
    out = {}
    for kind, pred in (("good", spec.good), ("bad", spec.bad)):
        if mode == "step":
            mask = np.zeros(n.shape, dtype=bool)
            for i, j in spec.steps:
                mask |= pred(n - i, g - j)
        elif mode == "same_n":
            towards = -1 if (kind == "good") == (spec.orientation == C_MINUS) else 1
            mask = pred(n, g + towards)
        else:
            raise DomainError(f"unknown mode {mode!r}")
        out[kind] = (n[mask], g[mask])
    return out


def check_condition_s(spec: WalkSpec, m_max: int, *, n_min: int = 0) -> dict:
    """Condition 3 under both shifted-boundary definitions.

    Reports the minimum of s and the number of non-positive values on each
    shifted boundary, over points with ``n >= n_min``.  ``c`` is the grid
    minimum on the shifted bad boundary.
    """
    report = {"n_min": n_min}
    for mode in ("step", "same_n"):
        sb = shifted_boundaries(spec, m_max, mode)
        entry = {}
        for kind in ("good", "bad"):
            n, g = sb[kind]
            keep = n >= n_min
            n, g = n[keep], g[keep]
            s = s_array(spec, n, g) if n.size else np.zeros(0)
            entry[kind] = {
                "points": int(n.size),
                "min_s": float(s.min()) if s.size else None,
                "non_positive": int(np.sum(s <= 0)),
                "argmin": [int(n[s.argmin()]), int(g[s.argmin()])] if s.size else None,
            }
        entry["good_positive"] = entry["good"]["non_positive"] == 0
        entry["c"] = entry["bad"]["min_s"]
        entry["bad_bounded_below"] = entry["c"] is not None and entry["c"] > 0
        report[mode] = entry
    return report


def check_start_sequence(spec: WalkSpec, starts: Sequence[tuple[int, int]]) -> dict:
    """Condition 4: s(n, g_n) along a start sequence should decrease to 0."""
    n = np.array([p[0] for p in starts], dtype=np.int64)
    g = np.array([p[1] for p in starts], dtype=np.int64)
    if n.size and not np.all(spec.inner(n, g)):
        raise DomainError("every start point must be inner")
    s = s_array(spec, n, g) if n.size else np.zeros(0)
    dec = bool(np.all(np.diff(s) < 0)) if s.size > 1 else True
    return {"starts": [list(map(int, p)) for p in starts], "s": s.tolist(), "decreasing": dec}


# ------------------------------------------------------------------ boundaries

def _log_q_points(spec, table, n, g):
    logE = np.array([math.log(table.value(int(a), int(b))) for a, b in zip(n, g)])
    return logE - spec.log_omega(n, g)


def check_boundary_values(spec: WalkSpec, table, n_range) -> dict:
    """Condition 2: Q along both boundaries for n in ``n_range`` (read from the table).

    Good boundary: the tail should approach 1 monotonically.  Bad boundary:
    values should stay bounded; the report says whether they also decrease.
    """
    n_vals = np.asarray(list(n_range), dtype=np.int64)
    out = {}
    for kind, pred in (("good", spec.good), ("bad", spec.bad)):
        pts_n, pts_g = [], []
        skipped = 0
        for n in n_vals:
            gs = np.arange(0, n // 2 + 1)
            hit = gs[pred(np.full(gs.shape, n), gs)]
            for g in hit:
                if spec.omega_model is not None and not spec.omega_model.in_domain(int(n), int(g)):
                    skipped += 1  # e.g. (n, n/2) on the large-v bad line: never reached
                    continue
                if table.is_stored(int(n), int(g)):
                    pts_n.append(int(n))
                    pts_g.append(int(g))
        pn = np.array(pts_n, dtype=np.int64)
        pg = np.array(pts_g, dtype=np.int64)
        q = np.exp(_log_q_points(spec, table, pn, pg)) if pn.size else np.zeros(0)
        entry = {"n": pn.tolist(), "g": pg.tolist(), "Q": q.tolist(), "skipped_out_of_domain": skipped}
        if kind == "good":
            dist = np.abs(q - 1)
            entry["monotone_to_one"] = bool(np.all(np.diff(dist) <= 0)) if q.size > 1 else True
            entry["last_abs_error"] = float(dist[-1]) if q.size else None
        else:
            entry["max_Q"] = float(q.max()) if q.size else None
            entry["decreasing"] = bool(np.all(np.diff(q) <= 0)) if q.size > 1 else True
        out[kind] = entry
    return out


def validate_spec(spec: WalkSpec, m_max: int) -> dict:
    """Check disjointness, closure under the steps and the orientation chain on a grid."""
    n, g = enumerate_points(spec, m_max)
    overlap = int(np.sum(spec.good(n, g) | spec.bad(n, g)))
    gn, gg = enumerate_points(spec, m_max, "good")
    bn, bg = enumerate_points(spec, m_max, "bad")
    gb_overlap = int(np.sum(spec.bad(gn, gg)))
    escapes = []
    for i, j in spec.steps:
        tn, tg = n - i, g - j
        ok = spec.inner(tn, tg) | spec.good(tn, tg) | spec.bad(tn, tg)
        for a, b in zip(n[~ok][:5], g[~ok][:5]):
            escapes.append([int(a), int(b), i, j])
    # ordering per level line
    lv_i = level_of(spec, n, g)
    lv_g = level_of(spec, gn, gg)
    lv_b = level_of(spec, bn, bg)
    order_ok = True
    for m in np.unique(lv_i):
        gi = g[lv_i == m]
        goods = gg[lv_g == m]
        bads = bg[lv_b == m]
        if spec.orientation == C_MINUS:
            if goods.size and goods.max() >= gi.min():
                order_ok = False
            if bads.size and bads.min() <= gi.max():
                order_ok = False
        else:
            if bads.size and bads.max() >= gi.min():
                order_ok = False
            if goods.size and goods.min() <= gi.max():
                order_ok = False
    return {"inner_points": int(n.size), "inner_boundary_overlap": overlap,
            "good_bad_overlap": gb_overlap, "closure_escapes": escapes,
            "ordering_ok": order_ok,
            "valid": overlap == 0 and gb_overlap == 0 and not escapes and order_ok}


# ------------------------------------------------------------------ error products

@dataclass(frozen=True)
class ErrorProducts:
    """Level-wise extremes of ``A = sum alpha`` and the truncated products r+-.

    ``log_ext_plus[m] = log max(1, max A on I(m))`` and likewise for the
    minus side, for levels ``0..k_max``.  ``r_plus(k)`` multiplies levels
    ``k+1..k_max``; the part beyond ``k_max`` is reported separately as
    ``tail_bound``, an estimate of ``sum_{m > k_max} |A - 1|``.
    """

    k_max: int
    log_ext_plus: np.ndarray = field(repr=False)
    log_ext_minus: np.ndarray = field(repr=False)
    tail_bound: float = 0.0

    def _cum(self, arr):
        return np.concatenate([[0.0], np.cumsum(arr)])

    def log_ratio_plus(self, m_tau, m_0):
        """``log(r+(m_tau) / r+(m_0))``, the sum over levels ``m_tau+1 .. m_0``."""
        c = self._cum(self.log_ext_plus)
        return c[np.asarray(m_0) + 1] - c[np.asarray(m_tau) + 1]

    def log_ratio_minus(self, m_tau, m_0):
        c = self._cum(self.log_ext_minus)
        return c[np.asarray(m_0) + 1] - c[np.asarray(m_tau) + 1]

    def r_plus(self, k):
        return float(np.exp(self.log_ext_plus[k + 1:].sum()))

    def r_minus(self, k):
        return float(np.exp(self.log_ext_minus[k + 1:].sum()))


def error_products(spec: WalkSpec, k_max: int, *, tail_window: int = 64) -> ErrorProducts:
    """Level-wise extremes of A and the truncated r+- up to level ``k_max``.

    The tail bound fits ``|A - 1| <= C / (m log^2 m)`` on the last
    ``tail_window`` complete levels and sums the bound analytically:
    ``sum_{m > K} 1/(m log^2 m) ~ 1/log K``.
    """
    k_max = check_nonnegative_int(k_max, "k_max")
    n, g = enumerate_points(spec, k_max)
    plus = np.zeros(k_max + 1)
    minus = np.zeros(k_max + 1)
    tail = 0.0
    if n.size:
        A = alpha_array(spec, n, g).sum(axis=1)
        lv = level_of(spec, n, g)
        logA = np.log(A)
        np.maximum.at(plus, lv, np.maximum(logA, 0.0))
        np.minimum.at(minus, lv, np.minimum(logA, 0.0))
        recent = lv > max(k_max - tail_window, 2)
        if np.any(recent):
            m = lv[recent].astype(float)
            C = float(np.max(np.abs(A[recent] - 1) * m * np.log(m) ** 2))
            tail = C / math.log(max(k_max, 3))
    return ErrorProducts(k_max, plus, minus, tail)


# ------------------------------------------------------------------ Monte Carlo

@dataclass
class WalkRunStats:
    """Aggregated Monte Carlo output; every mean carries its standard error."""

    runs: int
    seed: int
    start: tuple[int, int]
    L: int
    Q0: float
    p_good: float
    p_good_se: float
    p_good_and_deep: float
    p_good_and_deep_se: float
    mean_rQ_minus: float
    mean_rQ_minus_se: float
    mean_rQ_plus: float
    mean_rQ_plus_se: float
    mean_Q_prodA: float
    mean_Q_prodA_se: float
    mean_S_tau_minus_1: float
    mean_S_tau_minus_1_se: float
    S0: float
    histogram: dict = field(default_factory=dict)
    level_assert_checked: bool = False
    n_tau: np.ndarray = field(default=None, repr=False)
    g_tau: np.ndarray = field(default=None, repr=False)
    q_tau: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if not isinstance(v, np.ndarray)}
        out["start"] = list(self.start)
        out["histogram"] = {f"{k[0]},{k[1]}": v for k, v in sorted(self.histogram.items())}
        return out


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()) if x.size else float("nan"), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _uniforms(children, steps):
    return np.stack([np.random.Generator(np.random.PCG64(c)).random(steps) for c in children])


def simulate_walk(spec: WalkSpec, start: tuple[int, int], runs: int, seed: int, L: int = 10,
                  table=None, *, products: ErrorProducts | None = None,
                  chunk: int = 2048, keep_paths: bool = False) -> WalkRunStats:
    """Run ``runs`` independent stopped walks from ``start``.

    Randomness: ``numpy.random.SeedSequence(seed).spawn(runs)`` gives one
    PCG64 stream per run and step k of run r consumes the k-th uniform of
    stream r, so results do not depend on chunking or scheduling.  Step
    choice inverts the cumulative normalised alphas in step-set order.

    Q at the stopping point is read from the exact ``table``.  When the
    spec has unit level steps, ``M_k = M_0 - k`` is asserted on every
    trajectory.
    """
    runs = check_positive_int(runs, "runs")
    L = check_nonnegative_int(L, "L")
    if table is None:
        raise DomainError("simulate_walk needs an exact table for Q at the stopping points")
    n0, g0 = map(int, start)
    if not bool(spec.inner(np.array([n0]), np.array([g0]))[0]):
        raise DomainError(f"start {start} is not an inner point of {spec.name}")

    # classify the box [0, n0] x [0, g0] that contains every reachable point
    width = g0 + 1
    N, G = np.meshgrid(np.arange(n0 + 1), np.arange(width), indexing="ij")
    N = N.ravel()
    G = G.ravel()
    code = np.zeros(N.shape, dtype=np.int8)
    code[spec.bad(N, G)] = 3
    code[spec.good(N, G)] = 2
    code[spec.inner(N, G)] = 1
    inner_idx = np.nonzero(code == 1)[0]
    bnd_idx = np.nonzero(code >= 2)[0]

    m0 = int(level_of(spec, n0, g0))
    if products is None:
        products = error_products(spec, m0)

    # transition tables on inner points
    nsteps = len(spec.steps)
    alpha = alpha_array(spec, N[inner_idx], G[inner_idx])
    A = alpha.sum(axis=1)
    cum = np.cumsum(alpha / A[:, None], axis=1)
    cum[:, -1] = 1.0
    cum_full = np.zeros((N.size, nsteps))
    cum_full[inner_idx] = cum
    logA_full = np.zeros(N.size)
    logA_full[inner_idx] = np.log(A)
    s_full = np.zeros(N.size)
    s_full[inner_idx] = s_array(spec, N[inner_idx], G[inner_idx])
    logq_full = np.full(N.size, -np.inf)
    in_dom = (lambda a, b: spec.omega_model.in_domain(a, b)) if spec.omega_model else (lambda a, b: True)
    stored = np.array([table.is_stored(int(a), int(b)) and in_dom(int(a), int(b))
                       for a, b in zip(N[bnd_idx], G[bnd_idx])], dtype=bool)
    ok_idx = bnd_idx[stored]
    logq_full[ok_idx] = _log_q_points(spec, table, N[ok_idx], G[ok_idx])
    has_q = np.zeros(N.size, dtype=bool)
    has_q[ok_idx] = True
    offsets = np.array([i * width + j for i, j in spec.steps], dtype=np.int64)

    Q0 = float(math.exp(_log_q_points(spec, table, np.array([n0]), np.array([g0]))[0]))
    S0 = float(s_full[n0 * width + g0])
    max_steps = m0 + 1
    children = np.random.SeedSequence(seed).spawn(runs)

    end_idx = np.empty(runs, dtype=np.int64)
    last_s = np.empty(runs)
    path_logA = np.empty(runs)
    unit = spec.unit_level_steps
    for c0 in range(0, runs, chunk):
        kids = children[c0:c0 + chunk]
        U = _uniforms(kids, max_steps)
        size = len(kids)
        pos = np.full(size, n0 * width + g0, dtype=np.int64)
        alive = np.ones(size, dtype=bool)
        s_last = np.zeros(size)
        sum_logA = np.zeros(size)
        for k in range(max_steps):
            if not alive.any():
                break
            idx = np.nonzero(alive)[0]
            p = pos[idx]
            s_last[idx] = s_full[p]
            sum_logA[idx] += logA_full[p]
            choice = (U[idx, k][:, None] >= cum_full[p]).sum(axis=1)
            choice = np.minimum(choice, nsteps - 1)
            new = p - offsets[choice]
            if np.any(new < 0):
                raise ClosureViolation("walk stepped below the grid origin")
            new_code = code[new]
            if np.any(new_code == 0):
                bad_p = new[new_code == 0][0]
                raise ClosureViolation(
                    f"walk left inner/good/bad at ({bad_p // width}, {bad_p % width})")
            if unit:
                lv_new = level_of(spec, new // width, new % width)
                if np.any(lv_new != m0 - k - 1):
                    raise AssertionError("level did not drop by exactly one per step")
            pos[idx] = new
            stop = new_code >= 2
            alive[idx[stop]] = False
        if alive.any():
            raise ClosureViolation("walk did not stop within the level bound")
        end_idx[c0:c0 + size] = pos
        last_s[c0:c0 + size] = s_last
        path_logA[c0:c0 + size] = sum_logA

    if not np.all(has_q[end_idx]):
        miss = end_idx[~has_q[end_idx]][0]
        raise DomainError(f"table lacks the stopping point ({miss // width}, {miss % width})")
    n_tau = end_idx // width
    g_tau = end_idx % width
    q_tau = np.exp(logq_full[end_idx])
    m_tau = level_of(spec, n_tau, g_tau)
    good = code[end_idx] == 2
    deep = good & (n_tau > L)
    rq_plus = q_tau * np.exp(products.log_ratio_plus(m_tau, m0))
    rq_minus = q_tau * np.exp(products.log_ratio_minus(m_tau, m0))
    q_prod = q_tau * np.exp(path_logA)
    hist = {}
    for a, b in zip(n_tau.tolist(), g_tau.tolist()):
        hist[(a, b)] = hist.get((a, b), 0) + 1

    pg = _mean_se(good)
    pd = _mean_se(deep)
    rm = _mean_se(rq_minus)
    rp = _mean_se(rq_plus)
    qa = _mean_se(q_prod)
    sl = _mean_se(last_s)
    return WalkRunStats(
        runs=runs, seed=int(seed), start=(n0, g0), L=L, Q0=Q0,
        p_good=pg[0], p_good_se=pg[1], p_good_and_deep=pd[0], p_good_and_deep_se=pd[1],
        mean_rQ_minus=rm[0], mean_rQ_minus_se=rm[1], mean_rQ_plus=rp[0], mean_rQ_plus_se=rp[1],
        mean_Q_prodA=qa[0], mean_Q_prodA_se=qa[1],
        mean_S_tau_minus_1=sl[0], mean_S_tau_minus_1_se=sl[1], S0=S0,
        histogram=hist, level_assert_checked=unit,
        n_tau=n_tau if keep_paths else None, g_tau=g_tau if keep_paths else None,
        q_tau=q_tau if keep_paths else None)


def verify_sandwich(stats: WalkRunStats, *, sigmas: float = 3.0, strict: bool = False) -> dict:
    """Check ``E(r- Q_tau) <= Q0 <= E(r+ Q_tau)`` up to ``sigmas`` standard errors.

    Also checks the unbiased identity ``E(Q_tau * prod A_k) = Q0`` at the same
    tolerance.  With ``strict`` a violation raises ``SandwichViolation``.
    """
    lower_ok = stats.mean_rQ_minus - sigmas * stats.mean_rQ_minus_se <= stats.Q0
    upper_ok = stats.Q0 <= stats.mean_rQ_plus + sigmas * stats.mean_rQ_plus_se
    unbiased_ok = abs(stats.mean_Q_prodA - stats.Q0) <= sigmas * stats.mean_Q_prodA_se + 1e-12 * stats.Q0
    report = {"Q0": stats.Q0, "lower": stats.mean_rQ_minus, "lower_se": stats.mean_rQ_minus_se,
              "upper": stats.mean_rQ_plus, "upper_se": stats.mean_rQ_plus_se,
              "unbiased": stats.mean_Q_prodA, "unbiased_se": stats.mean_Q_prodA_se,
              "lower_ok": bool(lower_ok), "upper_ok": bool(upper_ok),
              "unbiased_ok": bool(unbiased_ok), "holds": bool(lower_ok and upper_ok)}
    if strict and not report["holds"]:
        raise SandwichViolation(f"sandwich violated: {report}")
    return report


def supermartingale_check(spec: WalkSpec, table, products: ErrorProducts, m_max: int) -> dict:
    """Exact one-step check that ``R-_k Q_k`` is a supermartingale and ``R+_k Q_k`` a submartingale.

    With ``R(m) = r(m)`` truncated at ``products.k_max``, evaluates
    ``E(R_{k+1} Q_{k+1} | point) / (R_k Q_k)`` at every inner point up to
    level ``m_max`` whose neighbours are in the table, using exact Q.
    """
    n, g = enumerate_points(spec, min(m_max, products.k_max))
    keep = np.array([all(table.is_stored(int(a) - i, int(b) - j) for i, j in spec.steps)
                     and table.is_stored(int(a), int(b)) for a, b in zip(n, g)], dtype=bool)
    n, g = n[keep], g[keep]
    if n.size == 0:
        return {"points": 0, "max_minus_ratio": None, "min_plus_ratio": None, "holds": True}
    alpha = alpha_array(spec, n, g)
    A = alpha.sum(axis=1)
    logq = _log_q_points(spec, table, n, g)
    cp = np.concatenate([[0.0], np.cumsum(products.log_ext_plus)])
    cm = np.concatenate([[0.0], np.cumsum(products.log_ext_minus)])
    K = products.k_max
    lv = level_of(spec, n, g)
    # log r(m) truncated at K = cum[K+1] - cum[m+1]
    lr_p = cp[K + 1] - cp[lv + 1]
    lr_m = cm[K + 1] - cm[lv + 1]
    num_p = np.zeros(n.size)
    num_m = np.zeros(n.size)
    for k, (i, j) in enumerate(spec.steps):
        tn, tg = n - i, g - j
        tq = np.exp(_log_q_points(spec, table, tn, tg) - logq)
        tl = level_of(spec, tn, tg)
        num_p += alpha[:, k] / A * tq * np.exp(cp[K + 1] - cp[tl + 1] - lr_p)
        num_m += alpha[:, k] / A * tq * np.exp(cm[K + 1] - cm[tl + 1] - lr_m)
    tol = 1e-10
    return {"points": int(n.size), "max_minus_ratio": float(num_m.max()),
            "min_plus_ratio": float(num_p.min()),
            "holds": bool(num_m.max() <= 1 + tol and num_p.min() >= 1 - tol)}
