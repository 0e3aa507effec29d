"""Numerical support for the conjectured asymptotics of triangulations.

The conjectured form is

    tau(n, g) ~ 1/(4 (3 pi)^(3/2)) n^(2g - 5/2) e^(n f(g/n)) J(g/n)

with f and J from ``parametric.triangulation_functions``.  Nothing here is
a proof: the report only records how tau/Omega moves along a ray.
"""

from __future__ import annotations

import mpmath

from ._validation import check_precision, exact_str, parse_ray, ray_points
from .errors import DomainError, NotValidatedError
from .exact import TRIANGULATION
from .omega import OmegaModel, log_exact, log_omega

__all__ = ["log_omega_triangulation", "conjecture_ratio_trend", "PREFACTOR_LOG",
           "shape_comparison"]

PREFACTOR_LOG = -mpmath.log(4 * (3 * mpmath.pi) ** mpmath.mpf(1.5))


def log_omega_triangulation(n: int, g: int, precision: int | None = None):
    """Log of the conjectured asymptotic for tau(n, g); needs 0 < g/n < 1/2."""
    if n < 1 or not 0 < 2 * g < n:
        raise DomainError(f"(n, g)=({n}, {g}) is not interior to the ray fan 0 < g/n < 1/2")
    return log_omega(OmegaModel("triangulation", precision=precision), n, g)


def _monotone(seq):
    inc = all(b >= a for a, b in zip(seq, seq[1:]))
    dec = all(b <= a for a, b in zip(seq, seq[1:]))
    return inc or dec


def conjecture_ratio_trend(table, ray, n_points: int | None = None, *, tail: int = 5,
                           tolerance: float = 0.10, precision: int | None = None) -> dict:
    """tau(n, g)/Omega along ``g = ray * n`` with simple trend statistics.

    Uses the last ``n_points`` tabulated ray points (all by default).  The
    report flags whether ``|ratio - 1|`` shrinks monotonically over the last
    ``tail`` points and whether the final ratio is within ``tolerance``.
    """
    if table.kind != TRIANGULATION:
        raise DomainError("conjecture_ratio_trend needs a triangulation table")
    if not table.validated:
        raise NotValidatedError(
            "table was built from non-default seeds; only the validated seed "
            "tau(0,0)=1 reproduces the planar counts, so no conjecture check is reported")
    frac = parse_ray(ray)
    prec = check_precision(precision)
    pts = [(n, g) for n, g in ray_points(frac, table.n_max) if table.is_stored(n, g)]
    if n_points is not None:
        pts = pts[-n_points:]
    if len(pts) < 2:
        raise DomainError(f"ray {frac} has {len(pts)} usable point(s); a trend needs at least 2")
    rows = []
    for n, g in pts:
        val = table.value(n, g)
        with mpmath.workprec(prec + 32):
            ratio = mpmath.exp(log_exact(val, prec) - log_omega_triangulation(n, g, prec))
        rows.append({"n": n, "g": g, "exact": exact_str(val), "ratio": float(ratio)})
    errs = [abs(r["ratio"] - 1) for r in rows]
    last = errs[-tail:]
    return {
        "ray": f"{frac.numerator}/{frac.denominator}",
        "points": rows,
        "final_ratio": rows[-1]["ratio"],
        "tail_monotone_toward_one": all(b <= a for a, b in zip(last, last[1:])),
        "ratios_monotone": _monotone([r["ratio"] for r in rows]),
        "within_tolerance": errs[-1] <= tolerance,
        "tolerance": tolerance,
    }


def shape_comparison(n: int, g: int, precision: int | None = None) -> dict:
    """Both conjectured triangulation and unicellular g -> infinity forms at one point.

    Each is split as ``log C + e log n + n f + log J`` so the common shape
    ``n^(2g+e) e^(nf) J`` can be read off side by side.
    """
    from .parametric import parametric_point, triangulation_functions

    prec = check_precision(precision)
    if n < 1 or not 0 < 2 * g < n:
        raise DomainError(f"(n, g)=({n}, {g}) is not interior")
    with mpmath.workprec(prec + 32):
        theta = mpmath.mpf(g) / n
        tp = triangulation_functions(theta, prec=prec)
        up = parametric_point(theta, prec)
        tri = {"log_const": float(PREFACTOR_LOG), "n_exponent": 2 * g - 2.5,
               "f": float(tp.f_tri), "log_J": float(mpmath.log(tp.J_tri))}
        uni = {"log_const": float(-mpmath.log(2 * mpmath.sqrt(2) * mpmath.pi)),
               "n_exponent": 2 * g - 2, "f": float(up.f), "log_J": float(mpmath.log(up.J))}
    return {"n": n, "g": g, "triangulation": tri, "unicellular": uni}
