"""Acceptance checks, one function per criterion.

Each check returns a ``CriterionResult`` whose ``details`` hold the numbers
behind the verdict.  Tolerances are fixed here; only problem sizes (table
size, run count, seed) are parameters.  Criterion 10 is reported but never
gates the overall verdict.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from . import walk
from .exact import (build_triangulation_table, build_unicellular_table, catalan,
                    check_against_series, double_factorial, series_oracle)
from .fit import fit_ray, ode_residual_f, theory_constants
from .omega import OmegaModel, log_exact, log_omega, q_ratio
from .parametric import (high_genus_functions, lambda_of_theta, parametric_point,
                         theta_of_lambda)
from .saddle import (SaddleConfig, contour_xm, large_powers_estimate, mid_regime_estimate,
                     taylor_xm)
from .triangulation import conjecture_ratio_trend

__all__ = ["CriterionResult", "AcceptanceConfig", "CRITERIA", "run_all",
           "parity_adjusted", "small_v_offset"] + [f"criterion_{i}" for i in range(1, 11)]

QUOTED_MU = {"1/3": 117.923, "1/4": 1633.26}
QUOTED_C = {"1/3": 0.042124, "1/4": 0.033183}

# criteria 3, 4 and 8 are stated at fixed points and do not scale with n_max
FIT_N_MAX = 1000
TREND_N = (200, 400, 800, 1000)
WALK_START = (1000, 250)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    gating: bool = True
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        note = "" if self.gating else " (non-gating)"
        return f"criterion {self.number:2d} {tag}{note}: {self.name}"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AcceptanceConfig:
    """Problem sizes.  The defaults are the full-scale values.

    ``n_max`` sizes the identity table (capped at 500) and, through
    ``condition_n_max``, the condition grids; the fit, the g = n/4 trend and
    the Monte Carlo start are pinned to their stated points.
    """

    n_max: int = 1000
    runs: int = 10_000
    seed: int = 7
    precision: int = 256
    grid_points: int = 100
    trend_n: tuple[int, ...] = (250, 500, 1000, 2000)
    mid_n: tuple[int, ...] = (500, 1000, 2000)
    tri_n_max: int = 240
    condition_n_max: int = 1000


def parity_adjusted(n: int, v: float, mode: str = "nearest") -> int:
    """Integer v with ``v = n (mod 2)``, so that ``g = (n - v)/2`` is an integer.

    ``nearest`` picks the closer of the two candidates around v (ties go up),
    ``up`` the smallest admissible value >= v.
    """
    lo = math.floor(v)
    if (n - lo) % 2:
        lo -= 1
    hi = lo + 2
    if mode == "up":
        return lo if lo >= v else hi
    return lo if v - lo < hi - v else hi


def small_v_offset(n: int) -> int:
    """``n - 2g`` for the small-v trend: ceil(sqrt(log n)), raised to the parity of n."""
    return parity_adjusted(n, math.ceil(math.sqrt(math.log(n))), "up")


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = round(time.perf_counter() - t0, 3)
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _grid(lo, hi, k):
    return [lo + (hi - lo) * (i + 1) / (k + 1) for i in range(k)]


# ---------------------------------------------------------------- 1

@_timed
def criterion_1(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Exact identities for n <= 500 and agreement with the series extraction for n <= 60."""
    n_max = min(500, cfg.n_max)
    table = build_unicellular_table(n_max)
    bad = []
    for n in range(n_max + 1):
        row = table.row(n)
        if sum(row.values()) != double_factorial(2 * n - 1):
            bad.append(("sum", n))
        if table.value(n, 0) != catalan(n):
            bad.append(("catalan", n))
        if n % 2 == 0 and n >= 2:
            top = math.factorial(2 * n) // (2**n * math.factorial(n + 1))
            if table.value(n, n // 2) != top:
                bad.append(("one_vertex", n))
    checked = check_against_series(table, series_oracle(min(60, n_max) + 1))
    return CriterionResult(1, "exact-table identities", not bad,
                           details={"n_max": n_max, "failures": bad[:10], "series_entries": checked})


# ---------------------------------------------------------------- 2

@_timed
def criterion_2(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Round trip of the lambda equation, the lambda/f' identity, the h identity and the limiting ODE."""
    prec, k = cfg.precision, cfg.grid_points
    thetas = _grid(0, 0.5, k)
    round_trip = eq7 = h_id = 0.0
    with mpmath.workprec(prec + 32):
        for t in thetas:
            t = mpmath.mpf(t)
            lam = lambda_of_theta(t, prec=prec)
            round_trip = max(round_trip, float(abs(theta_of_lambda(lam, prec) - t)))
            pt = parametric_point(t, prec, crossover=0)
            eq7 = max(eq7, float(abs(1 - 4 * pt.lam - 4 * pt.lam**2 * mpmath.exp(-pt.f_prime))))
        for gm in _grid(0, 0.5, k):
            h_id = max(h_id, float(abs(high_genus_functions(mpmath.mpf(gm), prec).identity_residual())))
    ode = ode_residual_f(thetas, precision=prec)
    vals = {"round_trip": round_trip, "lambda_fprime_identity": eq7, "h_identity": h_id,
            "functional_equation": ode}
    return CriterionResult(2, "parametric identity suite", all(v < 1e-12 for v in vals.values()),
                           details={**vals, "grid_points": k, "precision": prec})


# ---------------------------------------------------------------- 3

@_timed
def criterion_3(cfg: AcceptanceConfig = AcceptanceConfig(), table=None) -> CriterionResult:
    """Growth rates and constants on the rays n = 3g and n = 4g against the quoted values."""
    n_max = FIT_N_MAX
    if table is None:
        table = build_unicellular_table(n_max, g_max=n_max // 3 + 1)
    rows = {}
    ok = True
    for ray in ("1/3", "1/4"):
        res = fit_ray(table, ray, precision=cfg.precision)
        mu_t, c_t = theory_constants(ray, cfg.precision)
        mu_err = abs(res.growth_mu / QUOTED_MU[ray] - 1)
        c_err = abs(res.constant_c / QUOTED_C[ray] - 1)
        rows[ray] = {"mu": res.growth_mu, "c": res.constant_c, "mu_quoted": QUOTED_MU[ray],
                     "c_quoted": QUOTED_C[ray], "mu_rel_err": mu_err, "c_rel_err": c_err,
                     "mu_ok": mu_err <= 1e-3, "c_ok": c_err <= 1e-2,
                     "mu_theory": mu_t, "c_theory": c_t,
                     "c_vs_theory_rel_err": abs(res.constant_c / c_t - 1),
                     "residual_trace": list(res.residual_trace)}
        ok = ok and rows[ray]["mu_ok"] and rows[ray]["c_ok"]
    return CriterionResult(3, "ray constants mu and c", ok, details={"n_max": n_max, **rows})


# ---------------------------------------------------------------- 4

@_timed
def criterion_4(cfg: AcceptanceConfig = AcceptanceConfig(), table=None) -> CriterionResult:
    """|Q(n, n/4) - 1| non-increasing over n in {200, 400, 800, 1000}, below 0.05 at the last n."""
    ns = list(TREND_N)
    if table is None:
        table = build_unicellular_table(max(ns), g_max=max(ns) // 4)
    model = OmegaModel("large_v", precision=cfg.precision)
    qs = [float(q_ratio(table, model, n, n // 4)) for n in ns]
    errs = [abs(q - 1) for q in qs]
    mono = all(b <= a for a, b in zip(errs, errs[1:]))
    return CriterionResult(4, "large-v trend at g = n/4", mono and errs[-1] < 0.05,
                           details={"n": ns, "Q": qs, "non_increasing": mono})


# ---------------------------------------------------------------- 5

@_timed
def criterion_5(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Small-v Q at n - 2g = ceil(sqrt(log n)) (parity-raised): within 0.1 of 1 at n = 2000, improving."""
    ns = list(cfg.trend_n)
    table = build_unicellular_table(max(ns), v_max=max(small_v_offset(n) for n in ns))
    model = OmegaModel("small_v", precision=cfg.precision)
    rows = []
    for n in ns:
        v = small_v_offset(n)
        rows.append({"n": n, "v": v, "Q": float(q_ratio(table, model, n, (n - v) // 2))})
    errs = [abs(r["Q"] - 1) for r in rows]
    improving = all(b < a for a, b in zip(errs, errs[1:]))
    at = next((r for r in rows if r["n"] == 2000), rows[-1])
    close = abs(at["Q"] - 1) <= 0.1
    # the exact [x^(v+1)] extraction shows where the excess of Q comes from
    for r in rows:
        n, v = r["n"], r["v"]
        with mpmath.workprec(cfg.precision + 32):
            log_df = mpmath.loggamma(2 * n + 1) - n * mpmath.log(2) - mpmath.loggamma(n + 1)
            est = log_df - mpmath.log(n) + mpmath.log(taylor_xm(n, v + 1, cfg.precision))
            r["extraction_over_omega"] = float(mpmath.exp(est - log_omega(model, n, (n - v) // 2)))
            r["exact_over_extraction"] = float(mpmath.exp(log_exact(table.value(n, (n - v) // 2)) - est))
    return CriterionResult(5, "small-v trend", improving and close,
                           details={"rows": rows, "improving": improving, "within_0.1_at": at["n"],
                                    "within_0.1": close})


# ---------------------------------------------------------------- 6

@_timed
def criterion_6(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Mid-regime estimate with c = 2 and v = round(2 log n): ratio in [0.8, 1.2] at 2000, moving to 1."""
    ns = list(cfg.mid_n)
    vs = {n: parity_adjusted(n, 2 * math.log(n)) for n in ns}
    table = build_unicellular_table(max(ns), v_max=max(vs.values()))
    rows = []
    for n in ns:
        g = (n - vs[n]) // 2
        with mpmath.workprec(cfg.precision + 32):
            r = mpmath.exp(log_exact(table.value(n, g), cfg.precision)
                           - mid_regime_estimate(n, g, 2.0, cfg.precision))
        rows.append({"n": n, "v": vs[n], "ratio": float(r)})
    errs = [abs(r["ratio"] - 1) for r in rows]
    toward = all(b < a for a, b in zip(errs, errs[1:]))
    last = rows[-1]["ratio"]
    return CriterionResult(6, "mid-regime trend", toward and 0.8 <= last <= 1.2,
                           details={"rows": rows, "toward_one": toward})


# ---------------------------------------------------------------- 7

def _doubling(hi, count=3):
    """``count`` even sizes ending at ``hi``, each twice the previous."""
    return [2 * (hi // 2 ** (count - k)) for k in range(count)]


@_timed
def criterion_7(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Conditions 1-4 in both regimes."""
    n_max = cfg.condition_n_max
    m_max = n_max // 2
    out = {}
    ok = True
    specs = {"large_v": walk.hz_large_v_spec(cfg.precision),
             "small_v": walk.hz_small_v_spec(cfg.precision)}
    large_table = build_unicellular_table(n_max, g_max=n_max // 2)
    for name, spec in specs.items():
        rep = {}
        valid = walk.validate_spec(spec, min(m_max, 200))
        c1 = walk.check_condition_probabilities(spec, m_max=m_max, complete_levels=m_max)
        rep["validate"] = {"valid": valid["valid"]}
        rep["condition_1"] = {"dyadic": c1["dyadic"], "non_increasing": c1["non_increasing"],
                              "sup_abs_residual": c1["sup_abs_residual"]}
        bnd = walk.check_boundary_values(spec, large_table, range(20, n_max + 1))
        if name == "large_v":
            c2_ok = bnd["good"]["monotone_to_one"] and bnd["bad"]["decreasing"]
            c3 = walk.check_condition_s(spec, m_max)
            c3_mode = "step"
            starts = [(n, n // 4) for n in _doubling(n_max)]
        else:
            # bad(n) jumps with the ceiling and the parity of n, so Q on it is
            # compared along doubling n rather than step by step
            dbl = set(_doubling(n_max))
            q_dbl = [q for n, q in zip(bnd["bad"]["n"], bnd["bad"]["Q"]) if n in dbl]
            bnd["bad"]["doubling_Q"] = q_dbl
            bnd["bad"]["decreasing"] = len(q_dbl) > 1 and all(b < a for a, b in zip(q_dbl, q_dbl[1:]))
            c2_ok = (bnd["good"]["monotone_to_one"] and bnd["bad"]["max_Q"] is not None
                     and bnd["bad"]["decreasing"])
            # one step from v = 1 never lands on the diagonal, so s = 0 there under the
            # step definition; the same-n definition is the one the regime supports
            # below n = 30 the shifted bad line still sits at v = 1, where s vanishes
            c3 = walk.check_condition_s(spec, m_max, n_min=30)
            c3_mode = "same_n"
            starts = [(n, (n - small_v_offset(n)) // 2) for n in _doubling(n_max)]
        rep["condition_2"] = {"good_Q_tail": bnd["good"]["Q"][-3:], "bad_Q_tail": bnd["bad"]["Q"][-3:],
                              "bad_Q_doubling": bnd["bad"].get("doubling_Q"),
                              "good_monotone": bnd["good"]["monotone_to_one"],
                              "bad_max": bnd["bad"]["max_Q"], "bad_decreasing": bnd["bad"]["decreasing"],
                              "ok": c2_ok}
        m3 = c3[c3_mode]
        rep["condition_3"] = {"mode": c3_mode, "good_min_s": m3["good"]["min_s"], "c": m3["c"],
                              "good_positive": m3["good_positive"],
                              "bad_bounded_below": m3["bad_bounded_below"],
                              "step_mode": {"good_positive": c3["step"]["good_positive"], "c": c3["step"]["c"]}}
        c4 = walk.check_start_sequence(spec, starts)
        rep["condition_4"] = c4
        this_ok = (valid["valid"] and c1["non_increasing"] and c2_ok and m3["good_positive"]
                   and m3["bad_bounded_below"] and c4["decreasing"])
        rep["ok"] = this_ok
        ok = ok and this_ok
        out[name] = rep
    return CriterionResult(7, "condition checkers", ok, details={"n_max": n_max, **out})


# ---------------------------------------------------------------- 8

@_timed
def criterion_8(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Large-v walk from (1000, 250): deep good absorption, sandwich, level assert, determinism."""
    start = WALK_START
    n0 = start[0]
    table = build_unicellular_table(n0, g_max=start[1])
    spec = walk.hz_large_v_spec(cfg.precision)
    products = walk.error_products(spec, int(walk.level_of(spec, *start)))
    stats = walk.simulate_walk(spec, start, cfg.runs, cfg.seed, 10, table, products=products)
    sand = walk.verify_sandwich(stats)
    again = walk.simulate_walk(spec, start, min(cfg.runs, 500), cfg.seed, 10, table, products=products)
    first = walk.simulate_walk(spec, start, min(cfg.runs, 500), cfg.seed, 10, table, products=products)
    deterministic = again.to_dict() == first.to_dict()
    ok = (stats.p_good_and_deep >= 0.99 and sand["holds"] and stats.level_assert_checked
          and deterministic)
    return CriterionResult(8, "Monte Carlo verification", ok,
                           details={"start": list(start), "runs": cfg.runs, "seed": cfg.seed,
                                    "p_good": stats.p_good,
                                    "p_good_and_deep": stats.p_good_and_deep,
                                    "p_good_and_deep_se": stats.p_good_and_deep_se,
                                    "sandwich": sand, "level_assert": stats.level_assert_checked,
                                    "deterministic": deterministic})


# ---------------------------------------------------------------- 9

@_timed
def criterion_9(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Contour extraction: radius independence, Taylor oracle, large-powers estimate."""
    rows = {}
    big_n = 10**6
    big_m = math.ceil(math.log(big_n))
    for n, m in ((500, 7), (big_n, big_m)):
        sc = SaddleConfig.for_point(n, m)
        a = contour_xm(n, m, sc)
        b = contour_xm(n, m, sc, radius=1.2 * sc.saddle_ratio)
        t = float(taylor_xm(n, m, cfg.precision))
        rows[f"{n},{m}"] = {"value": a, "radius_rel_diff": abs(b / a - 1), "taylor_rel_err": abs(a / t - 1)}
    lp = large_powers_estimate(big_n, big_m) / rows[f"{big_n},{big_m}"]["value"]
    ok = (all(r["radius_rel_diff"] <= 1e-8 for r in rows.values())
          and rows["500,7"]["taylor_rel_err"] <= 1e-8 and abs(lp - 1) <= 0.05)
    return CriterionResult(9, "saddle-point contour", ok,
                           details={**rows, "large_powers_ratio": lp})


# ---------------------------------------------------------------- 10

@_timed
def criterion_10(cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    """Triangulation ratios along g = n/4 and g = n/3 (reported, never gating)."""
    n_max = cfg.tri_n_max
    table = build_triangulation_table(n_max, g_max=n_max // 3)
    rows = {}
    ok = True
    for ray in ("1/4", "1/3"):
        rep = conjecture_ratio_trend(table, ray)
        rows[ray] = {"final_n": rep["points"][-1]["n"], "final_ratio": rep["final_ratio"],
                     "tail_monotone_toward_one": rep["tail_monotone_toward_one"],
                     "within_tolerance": rep["within_tolerance"]}
        ok = ok and rep["tail_monotone_toward_one"] and rep["within_tolerance"]
    return CriterionResult(10, "triangulation conjecture support", ok, gating=False,
                           details={"n_max": n_max, **rows})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_all(cfg: AcceptanceConfig = AcceptanceConfig(), only=None) -> list[CriterionResult]:
    """Run the selected criteria (all by default); large tables are shared where possible."""
    wanted = sorted(only) if only else list(CRITERIA)
    shared = None
    if 3 in wanted or 4 in wanted:
        shared = build_unicellular_table(FIT_N_MAX, g_max=FIT_N_MAX // 3 + 1)
    results = []
    for i in wanted:
        if i in (3, 4):
            results.append(CRITERIA[i](cfg, table=shared))
        else:
            results.append(CRITERIA[i](cfg))
    return results


def overall(results) -> bool:
    """All gating criteria passed."""
    return all(r.passed for r in results if r.gating)


def _np_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))
