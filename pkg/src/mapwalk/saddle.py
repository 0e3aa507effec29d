"""Saddle-point cross-check for the intermediate regime n - 2g ~ c log n.

From ``((1+y)/(1-y))^x`` one extracts ``[y^(n+1)]`` by singularity analysis
and then ``[x^m]`` of ``2^x n^x / Gamma(x)`` by a Cauchy integral on the
circle ``|x| = m / log n``.  The integral is evaluated numerically with a
periodic trapezoid rule, compared against an exact Taylor convolution, and
against the closed-form large-powers estimate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath
import numpy as np
from scipy import special

from ._validation import check_positive_int, check_precision, exact_str
from .errors import ConvergenceError, DomainError
from .omega import OmegaModel, log_omega

__all__ = ["SaddleConfig", "complex_gamma", "rgamma", "y_coefficient_asymptotic",
           "y_coefficient_exact", "contour_xm", "taylor_xm", "large_powers_estimate",
           "saddle_maximizer", "mid_regime_estimate", "cauchy_estimate", "mid_regime_report"]

def _is_pole(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def complex_gamma(z):
    """Gamma on complex input (scipy), with signed infinities at the poles.

    At ``-k`` the sign is ``(-1)^k``, the sign of Gamma just to the right.
    Scalars in, scalar out; arrays are handled elementwise.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = special.gamma(arr)
    pole = _is_pole(arr)
    if np.any(pole):
        k = -arr[pole].real
        out[pole] = np.where(k % 2 == 0, np.inf, -np.inf)
    return complex(out[0]) if scalar else out


def rgamma(z):
    """``1/Gamma(z)``, entire; exactly zero at the poles of Gamma."""
    arr = np.asarray(z, dtype=complex)
    out = special.rgamma(np.atleast_1d(arr))
    return complex(out[0]) if arr.ndim == 0 else out


def y_coefficient_asymptotic(n: int, x) -> complex | float:
    """Two-singularity transfer estimate of ``[y^(n+1)] ((1+y)/(1-y))^x``.

    ``2^x n^(x-1)/Gamma(x) + (-1)^(n+1) 2^(-x) n^(-x-1)/Gamma(-x)``; at integer x
    one of the two terms vanishes through ``1/Gamma``.
    """
    check_positive_int(n, "n")
    x = complex(x)
    val = (2 ** x * n ** (x - 1) * rgamma(x)
           + (-1) ** (n + 1) * 2 ** (-x) * n ** (-x - 1) * rgamma(-x))
    return val.real if x.imag == 0 else val


def y_coefficient_exact(n: int, x) -> Fraction | mpmath.mpf:
    """Exact ``[y^(n+1)] ((1+y)/(1-y))^x``.

    Uses ``(k+1) a_(k+1) = 2x a_k + (k-1) a_(k-1)``, which follows from
    ``(1-y^2) F' = 2x F``.  Rational x gives a Fraction.
    """
    check_positive_int(n, "n")
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        prev, cur = Fraction(1), 2 * x
    else:
        x = mpmath.mpf(x)
        prev, cur = mpmath.mpf(1), 2 * x
    for k in range(1, n + 1):
        prev, cur = cur, (2 * x * cur + (k - 1) * prev) / (k + 1)
    return cur


@dataclass(frozen=True)
class SaddleConfig:
    """Contour parameters for ``[x^m] 2^x n^x / Gamma(x)``.

    ``saddle_ratio`` is the circle radius ``m / log n`` and ``xi`` its
    reciprocal.  Quadrature starts at ``quadrature_points`` and doubles until
    two results agree to ``tol`` relative, up to ``max_points``.
    """

    n: int
    m: int
    saddle_ratio: float
    xi: float
    quadrature_points: int = 4096
    precision: int = 256
    tol: float = 1e-8
    max_points: int = 1 << 20

    def __post_init__(self):
        if not self.saddle_ratio > 0:
            raise DomainError("saddle_ratio must be positive")
        if abs(self.xi * self.saddle_ratio - 1) > 1e-12:
            raise DomainError("xi must equal 1/saddle_ratio")
        check_precision(self.precision)

    @classmethod
    def for_point(cls, n: int, m: int, **kw) -> "SaddleConfig":
        check_positive_int(m, "m")
        if n < 2:
            raise DomainError("need n >= 2 so that log n > 0")
        zeta = m / math.log(n)
        return cls(n, m, zeta, 1 / zeta, **kw)

    def with_radius(self, radius: float) -> "SaddleConfig":
        return replace(self, saddle_ratio=radius, xi=1 / radius)


def _trapezoid(n, m, radius, points):
    phi = 2 * np.pi * np.arange(points) / points
    x = radius * np.exp(1j * phi)
    # (1/2 pi i) oint F(x) x^(-m-1) dx = mean over the circle of F(x) x^(-m)
    log_terms = x * math.log(2 * n) - m * np.log(x)
    vals = np.exp(log_terms) * rgamma(x)
    return float(np.mean(vals).real)


def contour_xm(n: int, m: int, cfg: SaddleConfig | None = None, *, radius: float | None = None,
               report: bool = False):
    """``[x^m] 2^x n^x / Gamma(x)`` by trapezoid quadrature of the Cauchy integral.

    The radius defaults to ``cfg.saddle_ratio``.  Raises ``ConvergenceError``
    if point doubling does not reach ``cfg.tol``.  With ``report=True`` a dict
    with the doubling history is returned instead of the value.
    """
    check_positive_int(m, "m")
    cfg = cfg or SaddleConfig.for_point(n, m)
    r = cfg.saddle_ratio if radius is None else float(radius)
    if not r > 0:
        raise DomainError("contour radius must be positive")
    points = cfg.quadrature_points
    history = [(points, _trapezoid(n, m, r, points))]
    while True:
        points *= 2
        if points > cfg.max_points:
            raise ConvergenceError(f"contour quadrature did not reach {cfg.tol} by {cfg.max_points} points; "
                                   f"history={history}")
        history.append((points, _trapezoid(n, m, r, points)))
        a, b = history[-2][1], history[-1][1]
        if abs(b - a) <= cfg.tol * abs(b):
            break
    if report:
        return {"value": history[-1][1], "radius": r, "history": history}
    return history[-1][1]


def taylor_xm(n: int, m: int, precision: int | None = None):
    """Oracle for ``contour_xm``: convolve Taylor coefficients of ``1/Gamma`` with ``(log 2n)^k/k!``."""
    prec = check_precision(precision)
    with mpmath.workprec(prec + 32):
        rg = mpmath.taylor(mpmath.rgamma, 0, m)
        L = mpmath.log(2 * mpmath.mpf(n))
        val = mpmath.fsum(rg[m - k] * L ** k / mpmath.factorial(k) for k in range(m + 1))
    return +val


def large_powers_estimate(n: int, m: int) -> float:
    """``A(z) B(z)^(log n) / (z^(m+1) sqrt(2 pi xi log n))`` with ``A = 2^x/Gamma``, ``B = e^x``, ``z = m/log n``."""
    cfg = SaddleConfig.for_point(n, m)
    z, L = cfg.saddle_ratio, math.log(n)
    log_val = (z * math.log(2) - math.lgamma(z) + z * L - (m + 1) * math.log(z)
               - 0.5 * math.log(2 * math.pi * cfg.xi * L))
    return math.exp(log_val)


def saddle_maximizer(n: int, m: int) -> float:
    """Saddle point of ``(2n)^x / (Gamma(x) x^(m+1))`` on ``x > 0``.

    Along the real axis the modulus blows up at 0+, so the saddle is the
    first critical point, a local minimum there and the maximum along the
    circle through it: the first root of ``log 2n - digamma(x) - (m+1)/x``
    where the sign changes from negative to positive.
    """
    from scipy.optimize import brentq

    check_positive_int(m, "m")

    def h(x):
        return math.log(2 * n) - special.digamma(x) - (m + 1) / x

    lo = 1e-6
    if h(lo) >= 0:
        raise DomainError(f"no saddle on the positive axis for (n, m)=({n}, {m})")
    hi = lo
    while h(hi) < 0:
        lo, hi = hi, hi * 1.25
        if hi > 4 * n:
            raise DomainError(f"no saddle on the positive axis for (n, m)=({n}, {m})")
    return brentq(h, lo, hi, xtol=1e-14, rtol=1e-14)


def mid_regime_estimate(n: int, g: int, c: float, precision: int | None = None):
    """Log of ``2^c/(c Gamma(c)) pi^(-1/2) n^(-3/2) 2^n n!/(n-2g)! (log n)^(n-2g)``."""
    if not c > 0:
        raise DomainError("c must be positive")
    return log_omega(OmegaModel("mid_v", c=c, precision=precision), n, g)


def cauchy_estimate(n: int, g: int, cfg: SaddleConfig | None = None) -> float:
    """Log of ``(2n-1)!!/n * [x^m] 2^x n^x/Gamma(x)`` with the contour value, m = n - 2g + 1."""
    m = n - 2 * g + 1
    val = contour_xm(n, m, cfg)
    if not val > 0:
        raise DomainError(f"contour value {val} is not positive at (n, m)=({n}, {m})")
    # log (2n-1)!! = log (2n)! - n log 2 - log n!
    log_df = math.lgamma(2 * n + 1) - n * math.log(2) - math.lgamma(n + 1)
    return log_df - math.log(n) + math.log(val)


def mid_regime_report(n: int, g: int, c: float, table=None, precision: int | None = None) -> dict:
    """Estimate, contour-based estimate and (with a table) the exact value and ratios."""
    est = mid_regime_estimate(n, g, c, precision)
    out = {"n": n, "g": g, "c": c, "v": n - 2 * g, "log_estimate": float(est)}
    try:
        out["log_cauchy_estimate"] = cauchy_estimate(n, g)
    except (ConvergenceError, DomainError) as exc:
        out["cauchy_error"] = str(exc)
    if table is not None and table.is_stored(n, g):
        e = table.value(n, g)
        out["exact"] = exact_str(e)
        with mpmath.workprec(check_precision(precision) + 32):
            le = mpmath.log(mpmath.mpf(e))
            out["ratio"] = float(mpmath.exp(le - est))
            if "log_cauchy_estimate" in out:
                out["cauchy_ratio"] = float(mpmath.exp(le - out["log_cauchy_estimate"]))
    return out


def _reflection_residual(z: complex) -> float:
    """``|Gamma(z) Gamma(1-z) sin(pi z) / pi - 1|``; used as a self-check."""
    return abs(complex_gamma(z) * complex_gamma(1 - z) * cmath.sin(cmath.pi * z) / cmath.pi - 1)
