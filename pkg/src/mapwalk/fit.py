"""Empirical asymptotic fits from exact tables.

Along a ray ``g = (p/q) n`` the counts behave like ``c g^(2g-2) mu^g``.  With
``a_k = log E(qk, pk) - (2g - 2) log g`` the first differences converge to
``p log mu`` and ``a_k - g log mu`` to ``log c``; both sequences carry an
asymptotic expansion in ``1/k``, so Richardson extrapolation in the
Bender-Orszag form accelerates them.

``RayAsymptoticFit`` wraps this as a scikit-learn estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_precision, parse_ray, ray_points
from .errors import DomainError
from .parametric import parametric_point

__all__ = ["FitResult", "RayAsymptoticFit", "fit_ray", "richardson", "theory_constants",
           "ode_residual_f", "guess_form", "MIN_RAY_POINTS"]

MIN_RAY_POINTS = 8


@dataclass(frozen=True)
class FitResult:
    """Fitted ``E(qk, pk) ~ c g^(a g + b) mu^g`` along one ray.

    ``residual_trace[N]`` is the change of the level-N Richardson estimate
    of ``log mu`` between the last two sample windows; it should shrink as N
    grows.  ``constant_trace`` is the same for ``log c``.
    """

    ray: Fraction
    exponent_a: float
    exponent_b: float
    growth_mu: float
    constant_c: float
    residual_trace: tuple[float, ...]
    constant_trace: tuple[float, ...] = ()
    points: int = 0
    log_mu: mpmath.mpf | None = field(default=None, repr=False)
    log_c: mpmath.mpf | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"ray": f"{self.ray.numerator}/{self.ray.denominator}",
                "exponent_a": self.exponent_a, "exponent_b": self.exponent_b,
                "growth_mu": self.growth_mu, "constant_c": self.constant_c,
                "residual_trace": list(self.residual_trace),
                "constant_trace": list(self.constant_trace), "points": self.points}


def richardson(seq, ks, order):
    """Bender-Orszag Richardson extrapolation of ``seq[-order-1:]`` sampled at ``ks``.

    Removes the ``1/k .. 1/k^order`` terms of an expansion
    ``s_k = s + c_1/k + c_2/k^2 + ...`` for distinct sample points ``k``.
    """
    if order < 0 or len(seq) < order + 1:
        raise DomainError("not enough terms for the requested Richardson order")
    tail = seq[len(seq) - order - 1:]
    ktail = [mpmath.mpf(k) for k in ks[len(ks) - order - 1:]]
    total = mpmath.mpf(0)
    for j, (s, kj) in enumerate(zip(tail, ktail)):
        # Lagrange weight of node 1/k_j evaluated at 1/k = 0
        w = mpmath.mpf(1)
        for i, ki in enumerate(ktail):
            if i != j:
                w *= kj / (kj - ki)
        total += w * s
    return total


def _log_e(value):
    return mpmath.log(mpmath.mpf(value))


def _ray_sequences(table, ray, prec):
    frac = parse_ray(ray)
    p, q = frac.numerator, frac.denominator
    pts = [(n, g) for n, g in ray_points(frac, table.n_max) if table.is_stored(n, g)]
    if len(pts) < MIN_RAY_POINTS:
        raise DomainError(f"ray {frac} has only {len(pts)} tabulated points; need {MIN_RAY_POINTS}")
    ks, a = [], []
    for n, g in pts:
        ks.append(n // q)
        a.append(_log_e(table.value(n, g)) - (2 * g - 2) * mpmath.log(g))
    return frac, p, q, ks, a


def fit_ray(table, ray, *, levels: int = 4, precision: int | None = None) -> FitResult:
    """Fit ``c`` and ``mu`` in ``E ~ c g^(2g-2) mu^g`` along ``g = ray * n``.

    ``levels`` is the highest Richardson order; the trace reports orders
    ``0..levels``.
    """
    prec = check_precision(precision)
    with mpmath.workprec(prec + 32):
        frac, p, q, ks, a = _ray_sequences(table, ray, prec)
        if len(ks) < levels + 3:
            raise DomainError("too few ray points for the requested number of levels")
        d = [a[i + 1] - a[i] for i in range(len(a) - 1)]
        dk = ks[:-1]
        trace = []
        for N in range(levels + 1):
            last = richardson(d, dk, N)
            prev = richardson(d[:-1], dk[:-1], N)
            trace.append(abs(last - prev))
        log_mu = richardson(d, dk, levels) / p
        b = [a[i] - p * ks[i] * log_mu for i in range(len(a))]
        ctrace = []
        for N in range(levels + 1):
            ctrace.append(abs(richardson(b, ks, N) - richardson(b[:-1], ks[:-1], N)))
        log_c = richardson(b, ks, levels)
    return FitResult(frac, 2.0, -2.0, float(mpmath.exp(log_mu)), float(mpmath.exp(log_c)),
                     tuple(float(t) for t in trace), tuple(float(t) for t in ctrace),
                     len(ks), +log_mu, +log_c)


def theory_constants(ray, precision: int | None = None) -> tuple[float, float]:
    """``(mu, c)`` predicted by the large-genus formula for the ray ``g = ray * n``.

    With ``r = q/p``: ``mu = r^2 exp(r f(p/q))`` and ``c = J(p/q) / (2 sqrt(2) pi r^2)``.
    """
    frac = parse_ray(ray)
    prec = check_precision(precision)
    with mpmath.workprec(prec + 32):
        pt = parametric_point(mpmath.mpf(frac.numerator) / frac.denominator, prec)
        r = mpmath.mpf(frac.denominator) / frac.numerator
        mu = r**2 * mpmath.exp(r * pt.f)
        c = pt.J / (2 * mpmath.sqrt(2) * mpmath.pi * r**2)
    return float(mu), float(c)


class RayAsymptoticFit(BaseEstimator):
    """Estimator form of ``fit_ray``.

    ``fit(table)`` learns ``mu_`` and ``c_``; ``predict(g)`` returns the
    fitted ``log(c g^(2g-2) mu^g)``.
    """

    def __init__(self, ray="1/3", levels=4, precision=None):
        self.ray = ray
        self.levels = levels
        self.precision = precision

    def fit(self, X, y=None):
        res = fit_ray(X, self.ray, levels=self.levels, precision=self.precision)
        self.result_ = res
        self.mu_ = res.growth_mu
        self.c_ = res.constant_c
        self.residual_trace_ = res.residual_trace
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        g = np.asarray(X, dtype=float).ravel()
        if np.any(g <= 0):
            raise DomainError("predict needs positive genera")
        return (math.log(self.c_) + (2 * g - 2) * np.log(g) + g * math.log(self.mu_))


def ode_residual_f(theta_grid, *, precision: int | None = None, f_shift=0) -> float:
    """Max residual of ``1 = 4 e^(-2t - f + t f') + 4 e^(-4t - 2f + 2t f' - f')`` on a grid.

    ``f_shift`` adds a constant to f, for sensitivity checks.
    """
    prec = check_precision(precision)
    worst = mpmath.mpf(0)
    with mpmath.workprec(prec + 32):
        for t in theta_grid:
            t = mpmath.mpf(t) if not isinstance(t, Fraction) else mpmath.mpf(t.numerator) / t.denominator
            if not 0 < t < mpmath.mpf(1) / 2:
                raise DomainError(f"theta={t} is not interior")
            pt = parametric_point(t, prec, crossover=0)
            f = pt.f + f_shift
            fp = pt.f_prime
            res = 1 - 4 * mpmath.exp(-2 * t - f + t * fp) - 4 * mpmath.exp(-4 * t - 2 * f + 2 * t * fp - fp)
            worst = max(worst, abs(res))
    return float(worst)


def _lsq(rows, rhs):
    A = mpmath.matrix(rows)
    b = mpmath.matrix(rhs)
    x, _ = mpmath.qr_solve(A, b)
    return x


def guess_form(table, ray=None, *, column: int | None = None, tail: int = 40,
               corrections: int = 3, precision: int | None = None) -> dict:
    """Recover exponents without assuming them, by least squares on the last ``tail`` points.

    Ray mode (``ray='p/q'``): fits ``log E = a g log g + b log g + g m + c0 + sum d_i g^-i``
    and reports ``a``, ``b`` and ``mu = exp(m)``.
    Column mode (``column=g``): fits ``log E = n log(mu) + e log n + c0 + sum d_i n^-i``
    and reports growth ``mu`` and polynomial exponent ``e``.
    """
    if (ray is None) == (column is None):
        raise DomainError("give exactly one of ray or column")
    prec = check_precision(precision)
    with mpmath.workprec(prec + 64):
        if ray is not None:
            frac = parse_ray(ray)
            pts = [(n, g) for n, g in ray_points(frac, table.n_max) if table.is_stored(n, g)]
            var = [g for _, g in pts]
        else:
            pts = [(n, column) for n in range(2 * column, table.n_max + 1)
                   if table.is_stored(n, column) and table.value(n, column) > 0]
            var = [n for n, _ in pts]
        if len(pts) < MIN_RAY_POINTS:
            raise DomainError("too few points for guess_form")
        pts = pts[-tail:]
        var = var[-tail:]
        rows, rhs = [], []
        for (n, g), x in zip(pts, var):
            x = mpmath.mpf(x)
            lx = mpmath.log(x)
            if ray is not None:
                row = [x * lx, lx, x, 1]
            else:
                row = [x, lx, 1]
            row += [x ** -i for i in range(1, corrections + 1)]
            rows.append(row)
            rhs.append(_log_e(table.value(n, g)))
        coef = _lsq(rows, rhs)
        if ray is not None:
            return {"mode": "ray", "ray": str(parse_ray(ray)), "a": float(coef[0]),
                    "b": float(coef[1]), "mu": float(mpmath.exp(coef[2])), "points": len(pts)}
        return {"mode": "column", "genus": column, "growth": float(mpmath.exp(coef[0])),
                "exponent": float(coef[1]), "points": len(pts)}
