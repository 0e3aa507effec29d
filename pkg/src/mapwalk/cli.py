"""Command-line entry point: ``mapwalk <subcommand> [options]``.

Exit codes: 0 success, 1 numerical or domain failure (a JSON object with
``error`` and ``message`` goes to stderr), 2 usage error.  ``verify-all``
exits 1 when a gating criterion fails.

All randomness comes from ``--seed``; the walk simulator derives one
substream per run with ``numpy.random.SeedSequence(seed).spawn(runs)``.
Big integers are written as decimal strings.  The default precision comes
from ``MAPWALK_PRECISION`` (256 bits if unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import walk
from ._validation import DEFAULT_PRECISION, exact_str, parse_ray
from .errors import MapwalkError

__all__ = ["RunConfig", "build_parser", "dispatch", "main"]


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every subcommand."""

    precision_bits: int = DEFAULT_PRECISION
    n_max: int | None = None
    seed: int = 0
    output_format: str = "json"
    regime: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise MapwalkError(f"precision must be at least 64 bits, got {self.precision_bits}")
        if self.output_format not in ("json", "csv"):
            raise MapwalkError(f"unknown output format {self.output_format!r}")


# ---------------------------------------------------------------- argument types

def _pair(text):
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'n,g', got {text!r}") from None


def _ray(text):
    try:
        return parse_ray(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _precision(text):
    val = int(text)
    if val < 64:
        raise argparse.ArgumentTypeError("precision must be at least 64 bits")
    return val


def _nonneg(text):
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return val


def _positive(text):
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _criteria_list(text):
    try:
        vals = sorted({int(x) for x in text.split(",") if x})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of criterion numbers, got {text!r}") from None
    if not vals or any(not 1 <= v <= 10 for v in vals):
        raise argparse.ArgumentTypeError("criterion numbers run from 1 to 10")
    return vals


# ---------------------------------------------------------------- output

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return exact_str(obj) if abs(obj) >= 2**53 else obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else str(val)
    if isinstance(obj, (mpmath.mpf,)):
        return _jsonable(float(obj))
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return str(obj)


def _emit(args, payload=None, text=None):
    if text is None:
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    return RunConfig(precision_bits=args.precision, n_max=getattr(args, "nmax", None),
                     seed=getattr(args, "seed", 0) or 0, output_format=args.format,
                     regime=getattr(args, "regime", None))


# ---------------------------------------------------------------- subcommands

def cmd_table(args):
    from .exact import build_triangulation_table, build_unicellular_table

    if args.kind == "unicellular":
        table = build_unicellular_table(args.nmax, g_max=args.gmax, v_max=args.vmax)
    else:
        table = build_triangulation_table(args.nmax, g_max=args.gmax)
    start = 0 if args.include_zero else 1
    if args.format == "csv":
        width = max((max(table.row(n), default=-1) for n in range(table.n_max + 1)), default=-1)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n"] + [f"g={g}" for g in range(width + 1)])
        for n in range(start, table.n_max + 1):
            row = table.row(n)
            w.writerow([n] + [exact_str(row[g]) if g in row else "" for g in range(width + 1)])
        _emit(args, text=buf.getvalue())
    else:
        rows = [{"n": n, "values": {str(g): exact_str(v) for g, v in table.row(n).items()}}
                for n in range(start, table.n_max + 1)]
        _emit(args, {"kind": table.kind, "n_max": table.n_max, "validated": table.validated,
                     "rows": rows})
    return 0


def cmd_asymptotic(args):
    from .parametric import parametric_point

    cfg = _config(args)
    pt = parametric_point(args.theta, cfg.precision_bits)
    row = {"theta": pt.theta, "lambda": pt.lam, "f": pt.f, "f_prime": pt.f_prime,
           "f_second": pt.f_second, "J": pt.J, "J_log_prime": pt.J_log_prime, "regime": pt.regime}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(row))
        w.writerow([mpmath.nstr(v, 20) if isinstance(v, mpmath.mpf) else v for v in row.values()])
        _emit(args, text=buf.getvalue())
    else:
        _emit(args, row)
    return 0


def cmd_ratio(args):
    from .exact import build_triangulation_table, build_unicellular_table
    from .omega import OmegaModel, log_omega, log_q_ratio

    cfg = _config(args)
    model = OmegaModel.parse(args.regime, precision=cfg.precision_bits)
    n, g = args.n, args.g
    if model.regime == "triangulation":
        table = build_triangulation_table(n, g_max=g)
    elif model.regime in ("small_v", "mid_v"):
        table = build_unicellular_table(n, v_max=max(n - 2 * g, 0) + 2)
    else:
        table = build_unicellular_table(n, g_max=g)
    e = table.value(n, g)
    lq = log_q_ratio(table, model, n, g)
    _emit(args, {"n": n, "g": g, "regime": model.regime, "c": model.c, "exact": exact_str(e),
                 "log_omega": log_omega(model, n, g), "log_Q": lq,
                 "Q": mpmath.exp(lq) if e else 0.0})
    return 0


def _spec_for(regime, precision):
    if regime == "large":
        return walk.hz_large_v_spec(precision)
    return walk.hz_small_v_spec(precision)


def cmd_check_conditions(args):
    from .acceptance import small_v_offset
    from .exact import build_unicellular_table

    cfg = _config(args)
    spec = _spec_for(args.regime, cfg.precision_bits)
    m_max = args.nmax // 2
    table = build_unicellular_table(args.nmax)
    if args.regime == "large":
        starts = [(n, n // 4) for n in (125, 250, 500, 1000, 2000) if n <= args.nmax]
        n_min = 0
    else:
        starts = [(n, (n - small_v_offset(n)) // 2) for n in (250, 500, 1000, 2000) if n <= args.nmax]
        n_min = 30
    report = {
        "regime": args.regime,
        "n_max": args.nmax,
        "validate": walk.validate_spec(spec, min(m_max, 200)),
        "condition_1": walk.check_condition_probabilities(spec, m_max=m_max, complete_levels=m_max),
        "condition_2": walk.check_boundary_values(spec, table, range(20, args.nmax + 1)),
        "condition_3": walk.check_condition_s(spec, m_max, n_min=n_min),
        "condition_4": walk.check_start_sequence(spec, starts),
    }
    report["condition_1"].pop("levels")
    report["condition_1"].pop("D")
    _emit(args, report)
    return 0


def cmd_walk_sim(args):
    from .exact import build_unicellular_table

    cfg = _config(args)
    spec = _spec_for(args.regime, cfg.precision_bits)
    n0, g0 = args.start
    if args.regime == "large":
        table = build_unicellular_table(n0, g_max=g0)
    else:
        table = build_unicellular_table(n0, v_max=n0 - 2 * g0 + 2)
    products = walk.error_products(spec, int(walk.level_of(spec, n0, g0)))
    stats = walk.simulate_walk(spec, (n0, g0), args.runs, args.seed, args.L, table, products=products)
    report = stats.to_dict()
    report["sandwich"] = walk.verify_sandwich(stats)
    report["error_products"] = {"k_max": products.k_max, "tail_bound": products.tail_bound}
    report["regime"] = args.regime
    _emit(args, report)
    return 0


def cmd_fit(args):
    from .exact import build_unicellular_table
    from .fit import fit_ray, theory_constants

    cfg = _config(args)
    table = build_unicellular_table(args.nmax, g_max=int(args.nmax * args.ray) + 1)
    res = fit_ray(table, args.ray, levels=args.levels, precision=cfg.precision_bits)
    mu, c = theory_constants(args.ray, cfg.precision_bits)
    out = res.to_dict()
    out.update({"n_max": args.nmax, "levels": args.levels, "mu_theory": mu, "c_theory": c})
    _emit(args, out)
    return 0


def cmd_mid_regime(args):
    from .exact import build_unicellular_table
    from .saddle import mid_regime_report

    cfg = _config(args)
    v = args.n - 2 * args.g
    if v < 0:
        raise MapwalkError("need n >= 2g")
    table = build_unicellular_table(args.n, v_max=v) if not args.no_exact else None
    _emit(args, mid_regime_report(args.n, args.g, args.c, table, cfg.precision_bits))
    return 0


def cmd_triangulation(args):
    from ._validation import ray_points
    from .exact import build_triangulation_table
    from .triangulation import conjecture_ratio_trend

    table = build_triangulation_table(args.nmax, g_max=int(args.nmax * args.ray) + 1)
    ray = f"{args.ray.numerator}/{args.ray.denominator}"
    if args.conjecture:
        report = conjecture_ratio_trend(table, args.ray, precision=args.precision)
    else:
        report = {"ray": ray, "points": [{"n": n, "g": g, "exact": exact_str(table.value(n, g))}
                                         for n, g in ray_points(args.ray, args.nmax)]}
    report["validated_seeds"] = table.validated
    _emit(args, report)
    return 0


def cmd_verify_all(args):
    from .acceptance import AcceptanceConfig, overall, run_all

    cfg = AcceptanceConfig(n_max=args.nmax, runs=args.runs, seed=args.seed,
                           precision=args.precision, condition_n_max=args.nmax)
    results = run_all(cfg, only=args.only)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    payload = []
    for r in results:
        d = r.to_dict()
        if not args.timings:
            d.pop("seconds")
        payload.append(d)
    ok = overall(results)
    _emit(args, {"config": {"n_max": cfg.n_max, "runs": cfg.runs, "seed": cfg.seed,
                            "precision": cfg.precision},
                 "results": payload, "all_gating_passed": ok})
    if not ok:
        failed = [r.number for r in results if r.gating and not r.passed]
        _error("AcceptanceFailure", f"gating criteria failed: {failed}")
        return 1
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION,
                        help="working precision in bits, at least 64 (default %(default)s, "
                             "from MAPWALK_PRECISION if set)")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format (default %(default)s; csv only for table and asymptotic)")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="mapwalk", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("table", parents=[common], help="exact table of E(n,g) or tau(n,g)")
    s.add_argument("--kind", choices=("unicellular", "triangulation"), default="unicellular")
    s.add_argument("--nmax", type=_nonneg, required=True)
    s.add_argument("--gmax", type=_nonneg, default=None, help="genus cap (default: full support)")
    s.add_argument("--vmax", type=_nonneg, default=None, help="cap on n - 2g (unicellular only)")
    s.add_argument("--include-zero", action="store_true", help="also emit the n = 0 row")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("asymptotic", parents=[common], help="lambda, f, J and derivatives at one theta")
    s.add_argument("--theta", type=float, required=True)
    s.set_defaults(func=cmd_asymptotic)

    s = sub.add_parser("ratio", parents=[common], help="Q(n,g) = E/Omega under one regime")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--regime", default="large", help="large, small, mid:c, inf or tri (default %(default)s)")
    s.set_defaults(func=cmd_ratio)

    s = sub.add_parser("check-conditions", parents=[common], help="walk conditions 1-4 on a grid")
    s.add_argument("--regime", choices=("large", "small"), required=True)
    s.add_argument("--nmax", type=_positive, default=400)
    s.set_defaults(func=cmd_check_conditions)

    s = sub.add_parser("walk-sim", parents=[common], help="Monte Carlo of the stopped walk")
    s.add_argument("--regime", choices=("large", "small"), required=True)
    s.add_argument("--start", type=_pair, required=True, help="start point 'n,g'")
    s.add_argument("--runs", type=_positive, default=10_000)
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--L", type=_nonneg, default=10, help="depth for deep absorption (default %(default)s)")
    s.set_defaults(func=cmd_walk_sim)

    s = sub.add_parser("fit", parents=[common], help="Richardson fit of mu and c along a ray")
    s.add_argument("--ray", type=_ray, required=True, help="p/q with g = (p/q) n")
    s.add_argument("--nmax", type=_positive, default=1000)
    s.add_argument("--levels", type=_nonneg, default=4)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("mid-regime", parents=[common], help="mid-regime estimate against exact data")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--g", type=_nonneg, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--no-exact", action="store_true", help="skip building the exact table")
    s.set_defaults(func=cmd_mid_regime)

    s = sub.add_parser("triangulation", parents=[common], help="exact tau along a ray")
    s.add_argument("--ray", type=_ray, required=True)
    s.add_argument("--nmax", type=_positive, default=120)
    s.add_argument("--conjecture", action="store_true",
                   help="also compare with the conjectured asymptotic form")
    s.set_defaults(func=cmd_triangulation)

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance criteria")
    s.add_argument("--nmax", type=_positive, default=1000)
    s.add_argument("--runs", type=_positive, default=10_000)
    s.add_argument("--seed", type=_nonneg, default=7)
    s.add_argument("--only", type=_criteria_list, default=None, help="comma list, e.g. 1,2,9")
    s.add_argument("--timings", action="store_true", help="include wall-clock seconds (not reproducible)")
    s.set_defaults(func=cmd_verify_all)
    return p


def _error(kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    if args.format == "csv" and args.command not in ("table", "asymptotic"):
        parser.error(f"--format csv is not supported by {args.command}")
    try:
        return args.func(args)
    except (MapwalkError, ArithmeticError, ValueError) as exc:
        _error(type(exc).__name__, str(exc))
        return 1


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
