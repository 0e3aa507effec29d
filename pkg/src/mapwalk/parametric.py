"""Parametric functions lambda(theta), f, J and their derivatives.

Two backends live here.  The scalar functions use mpmath at a configurable
binary precision (256 bits by default) and are what identities, Q ratios
and fits rely on.  The ``*_array`` functions are float64 numpy versions used
on large grids by the walk module, where millions of evaluations are needed
and 1e-13 relative accuracy is plenty.

Conventions: ``u = 1 - 4*lambda`` and ``gamma = 1/2 - theta``.  Near
``theta = 0`` the root is solved in ``u`` and near ``theta = 1/2`` in
``lambda`` given ``gamma``, so neither endpoint suffers cancellation.
Callers that know ``gamma`` exactly (for instance ``(n - 2g) / (2n)``)
should pass it; ``1/2 - theta`` loses digits when theta is close to 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from ._validation import check_precision
from .errors import ConvergenceError, DomainError

__all__ = [
    "ParametricPoint", "HighGenusPoint", "TriangulationPoint",
    "theta_of_lambda", "lambda_of_theta", "f_of_theta", "j_of_theta",
    "f_prime", "f_second", "j_log_prime", "parametric_point",
    "series_small_theta", "series_large_theta", "high_genus_functions",
    "log_k_factor", "k_factor", "theta_of_h", "triangulation_functions",
    "parametric_arrays", "DEFAULT_CROSSOVER", "SERIES_WINDOW",
]

#: Below this theta (or gamma) ``parametric_point`` switches to endpoint series.
DEFAULT_CROSSOVER = 1e-4
#: Endpoint series refuse arguments beyond this distance from the endpoint.
SERIES_WINDOW = 0.05

_GUARD = 32
_U_SERIES_CUTOFF = 0.0625


def _mpf(x):
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, tuple):
        return mpmath.mpf(x[0]) / x[1]
    try:
        from fractions import Fraction
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
    except ImportError:  # pragma: no cover
        pass
    return mpmath.mpf(x)


def _split(theta, gamma):
    """Return ``(theta, gamma)`` as mpf with ``theta + gamma = 1/2``."""
    if theta is None and gamma is None:
        raise DomainError("either theta or gamma is required")
    if gamma is None:
        theta = _mpf(theta)
        gamma = mpmath.mpf(1) / 2 - theta
    elif theta is None:
        gamma = _mpf(gamma)
        theta = mpmath.mpf(1) / 2 - gamma
    else:
        theta, gamma = _mpf(theta), _mpf(gamma)
    if theta < 0 or gamma < 0:
        raise DomainError(f"theta must lie in [0, 1/2], got {theta}")
    return theta, gamma


# ---------------------------------------------------------------- forward maps

def _theta_of_u(u):
    """theta as a function of ``u = 1 - 4 lambda`` and its u-derivative."""
    if u < _U_SERIES_CUTOFF:
        # theta = sum_{k>=1} u^k / (4k^2 - 1): no cancellation as u -> 0
        eps = mpmath.eps * u
        total = mpmath.mpf(0)
        deriv = mpmath.mpf(0)
        term = mpmath.mpf(1)
        k = 1
        while True:
            deriv += k * term / (4 * k * k - 1)
            term *= u
            piece = term / (4 * k * k - 1)
            total += piece
            if piece < eps:
                break
            k += 1
        return total, deriv
    s = mpmath.sqrt(u)
    lam = (1 - u) / 4
    theta = mpmath.mpf(1) / 2 - 2 * lam * mpmath.atanh(s) / s
    dtheta_dlam = (-1 / lam + (4 / u + 2 / lam) * theta) / 2
    return theta, -dtheta_dlam / 4


def _gamma_of_lambda(lam):
    """gamma = 1/2 - theta as a function of lambda, with d gamma / d lambda."""
    u = 1 - 4 * lam
    if u < _U_SERIES_CUTOFF:
        theta, dtdu = _theta_of_u(u)
        return mpmath.mpf(1) / 2 - theta, 4 * dtdu
    s = mpmath.sqrt(u)
    gamma = 2 * lam * mpmath.atanh(s) / s
    theta = mpmath.mpf(1) / 2 - gamma
    dtheta_dlam = (-1 / lam + (4 / u + 2 / lam) * theta) / 2
    return gamma, -dtheta_dlam


def theta_of_lambda(lam, prec: int | None = None):
    """Forward map ``theta(lambda) = 1/2 - lambda log((1+s)/(1-s)) / s`` with ``s = sqrt(1 - 4 lambda)``."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        lam = _mpf(lam)
        if lam < 0 or lam > mpmath.mpf(1) / 4:
            raise DomainError(f"lambda must lie in [0, 1/4], got {lam}")
        if lam == 0:
            return mpmath.mpf(1) / 2
        theta, _ = _theta_of_u(1 - 4 * lam)
    return +theta


def _newton_bracketed(func, lo, hi, x0, tol, max_iter=400):
    """Solve ``func(x) = 0`` for increasing ``func`` with a bisection safeguard.

    ``func`` returns ``(value, derivative)``.
    """
    x = x0 if lo < x0 < hi else (lo + hi) / 2
    for _ in range(max_iter):
        val, der = func(x)
        if abs(val) <= tol:
            return x
        if val > 0:
            hi = x
        else:
            lo = x
        step = x - val / der if der else None
        if step is None or not lo < step < hi:
            step = (lo + hi) / 2
        if step == x or hi - lo <= mpmath.eps * abs(x):
            return step
        x = step
    raise ConvergenceError(f"root finder stalled in bracket [{lo}, {hi}]")


def _solve_lambda(theta, gamma, tol):
    """Return ``(lambda, u)`` at working precision for an interior point."""
    if theta <= gamma:  # theta <= 1/4: solve theta(u) = theta for u in (0, 1)
        u0 = min(mpmath.mpf(3) * theta, mpmath.mpf("0.9"))

        def fu(u):
            t, dt = _theta_of_u(u)
            return t - theta, dt

        u = _newton_bracketed(fu, mpmath.mpf(0), mpmath.mpf(1), u0, tol)
        return (1 - u) / 4, u
    # theta > 1/4: gamma(lambda) is increasing; start from -lambda log lambda = gamma
    w = mpmath.lambertw(-gamma, -1) if gamma < 1 / mpmath.e else mpmath.mpf(-1)
    lam0 = -gamma / w.real if gamma < 1 / mpmath.e else mpmath.mpf(1) / 8

    def fl(lam):
        gm, dg = _gamma_of_lambda(lam)
        return gm - gamma, dg

    lam = _newton_bracketed(fl, mpmath.mpf(0), mpmath.mpf(1) / 4, lam0, tol)
    return lam, 1 - 4 * lam


def lambda_of_theta(theta=None, tol=None, prec: int | None = None, *, gamma=None):
    """Invert theta(lambda) on [0, 1/2].

    Endpoints return the limits exactly: ``theta = 0`` gives 1/4 and
    ``theta = 1/2`` gives 0.  The forward residual of the returned value is
    below ``tol`` (default ``2^-(prec-8)``).
    """
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        theta, gamma = _split(theta, gamma)
        tol = mpmath.ldexp(1, -(prec - 8)) if tol is None else _mpf(tol)
        if tol <= 0:
            raise DomainError("tol must be positive")
        if theta == 0:
            return mpmath.mpf(1) / 4
        if gamma == 0:
            return mpmath.mpf(0)
        lam, _ = _solve_lambda(theta, gamma, tol * mpmath.mpf(2) ** -8)
    return +lam


# ---------------------------------------------------------------- point bundle

@dataclass(frozen=True)
class ParametricPoint:
    """Values of lambda, f, J and derivatives at one theta."""

    theta: mpmath.mpf
    lam: mpmath.mpf
    f: mpmath.mpf
    f_prime: mpmath.mpf
    f_second: mpmath.mpf
    J: mpmath.mpf
    J_log_prime: mpmath.mpf
    regime: str = "interior"

    @property
    def gamma(self):
        return mpmath.mpf(1) / 2 - self.theta


def _interior(theta, gamma, prec, tol=None):
    tol = mpmath.ldexp(1, -(prec + 16)) if tol is None else tol
    lam, u = _solve_lambda(theta, gamma, tol)
    log_lam = mpmath.log(lam)
    log_u = mpmath.log(u)
    f = -theta * log_u - 2 * gamma * log_lam + 2 * (mpmath.log(2) - 1) * theta
    fp = mpmath.log(4) + 2 * log_lam - log_u
    # theta'(lambda) and its reciprocal lambda'(theta)
    if theta <= gamma:
        _, dtdu = _theta_of_u(u)
        dtheta_dlam = -4 * dtdu
    else:
        _, dg = _gamma_of_lambda(lam)
        dtheta_dlam = -dg
    dlam = 1 / dtheta_dlam
    fpp = (2 / lam + 4 / u) * dlam
    # D = 1 - 2 theta - 4 lambda + 4 theta lambda, written without cancellation
    if theta <= gamma:
        D = u * (1 - theta) - theta
    else:
        D = 2 * (gamma - lam - 2 * lam * gamma)
    J = mpmath.sqrt(2 / (lam * D))
    dD = -4 * dlam * (1 - theta) - u - 1
    jlp = -dlam / (2 * lam) - dD / (2 * D)
    return lam, f, fp, fpp, J, jlp


def parametric_point(theta=None, prec: int | None = None, *, gamma=None,
                     crossover: float = DEFAULT_CROSSOVER) -> ParametricPoint:
    """Evaluate everything at theta, dispatching to endpoint series within ``crossover``.

    At the endpoints themselves J and its log-derivative diverge and are
    returned as signed infinities.
    """
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        theta, gamma = _split(theta, gamma)
        if theta == 0:
            pt = ParametricPoint(theta, mpmath.mpf(1) / 4, mpmath.log(4), mpmath.inf,
                                 -mpmath.inf, mpmath.inf, -mpmath.inf, "endpoint_small")
        elif gamma == 0:
            pt = ParametricPoint(theta, mpmath.mpf(0), mpmath.log(2) - 1, -mpmath.inf,
                                 -mpmath.inf, mpmath.inf, mpmath.inf, "endpoint_large")
        elif theta < crossover:
            pt = _small_series(theta)
        elif gamma < crossover:
            pt = _large_series(theta, gamma, prec)
        else:
            vals = _interior(theta, gamma, prec)
            pt = ParametricPoint(theta, *vals, regime="interior")
    return ParametricPoint(*(+v if isinstance(v, mpmath.mpf) else v
                             for v in (pt.theta, pt.lam, pt.f, pt.f_prime, pt.f_second,
                                       pt.J, pt.J_log_prime)), regime=pt.regime)


def _open_interior(theta, gamma):
    if theta <= 0 or gamma <= 0:
        raise DomainError("theta must lie in the open interval (0, 1/2)")


def f_of_theta(theta=None, prec: int | None = None, *, gamma=None):
    """``f = -theta log(1-4 lambda) - (1-2 theta) log(lambda) + 2(log 2 - 1) theta``.

    Finite on the closed interval: 2 log 2 at 0 and log 2 - 1 at 1/2.
    """
    return parametric_point(theta, prec, gamma=gamma, crossover=0).f


def j_of_theta(theta=None, prec: int | None = None, *, gamma=None):
    """``J = sqrt(2 / (lambda (1 - 2 theta - 4 lambda + 4 theta lambda)))``; +inf at the endpoints."""
    return parametric_point(theta, prec, gamma=gamma, crossover=0).J


def f_prime(theta=None, prec: int | None = None, *, gamma=None):
    """``f' = log(4 lambda^2 / (1 - 4 lambda))``."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        t, g = _split(theta, gamma)
        _open_interior(t, g)
    return parametric_point(theta, prec, gamma=gamma, crossover=0).f_prime


def f_second(theta=None, prec: int | None = None, *, gamma=None):
    """``f'' = (2/lambda + 4/(1-4 lambda)) lambda'(theta)`` with ``lambda' = 1/theta'(lambda)``."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        t, g = _split(theta, gamma)
        _open_interior(t, g)
    return parametric_point(theta, prec, gamma=gamma, crossover=0).f_second


def j_log_prime(theta=None, prec: int | None = None, *, gamma=None):
    """``J'/J`` by differentiating the closed form of J through lambda(theta)."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        t, g = _split(theta, gamma)
        _open_interior(t, g)
    return parametric_point(theta, prec, gamma=gamma, crossover=0).J_log_prime


# ---------------------------------------------------------------- endpoint series

def _small_series(theta):
    lam = mpmath.mpf(1) / 4 - 3 * theta / 4 + 9 * theta**2 / 20
    lt = mpmath.log(theta)
    f = mpmath.log(4) - theta * lt + theta - theta * mpmath.log(12) - 27 * theta**2 / 10
    fp = -lt - mpmath.log(12) - 27 * theta / 5
    fpp = -1 / theta - mpmath.mpf(27) / 5
    rt = mpmath.sqrt(theta)
    J = 2 / rt + 27 * rt / 5
    dJ = -1 / (theta * rt) + 27 / (10 * rt)
    return ParametricPoint(theta, lam, f, fp, fpp, J, dJ / J, "endpoint_small")


def _large_series(theta, gamma, prec):
    # invert gamma = -lam log lam - 2 lam^2 (1 + log lam) for lam
    def fl(lam):
        ll = mpmath.log(lam)
        val = -lam * ll - 2 * lam**2 * (1 + ll) - gamma
        der = -ll - 1 - 4 * lam * (1 + ll) - 2 * lam
        return val, der

    w = mpmath.lambertw(-gamma, -1).real
    lam = _newton_bracketed(fl, mpmath.mpf(0), mpmath.exp(-2), -gamma / w,
                            mpmath.ldexp(1, -(prec + 16)))
    ll = mpmath.log(lam)
    l2 = mpmath.log(2)
    f = l2 - 1 + (2 + 2 * ll**2 + (2 * l2 - 2) * ll) * lam
    fp = 2 * ll + 2 * l2
    fpp = 2 / (lam * (1 + ll))
    r = mpmath.sqrt(-1 / (ll + 1))
    J = r / lam - r / (ll + 1)
    jlp = -1 / (lam * ll) - 1 / (2 * lam * ll**2)
    return ParametricPoint(theta, lam, f, fp, fpp, J, jlp, "endpoint_large")


def series_small_theta(theta, prec: int | None = None, *,
                       window: float = SERIES_WINDOW) -> ParametricPoint:
    """Leading terms of the theta -> 0 expansions of lambda, f, f', f'', J, J'/J.

    Remainders: lambda O(theta^(5/2)), f O(theta^3), f' O(theta),
    J O(theta^(3/2)).
    """
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        theta = _mpf(theta)
        if not 0 < theta <= window:
            raise DomainError(f"small-theta series needs 0 < theta <= {window}, got {theta}")
        pt = _small_series(theta)
    return pt


def series_large_theta(theta=None, prec: int | None = None, *, gamma=None,
                       window: float = SERIES_WINDOW) -> ParametricPoint:
    """Leading terms of the theta -> 1/2 expansions, parametrised by lambda.

    lambda solves ``1/2 - theta = -lambda log lambda - 2 lambda^2 (1 + log lambda)``;
    the remaining quantities then carry O(lambda) or O(lambda^2) remainders.
    """
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        theta, gamma = _split(theta, gamma)
        if not 0 < gamma <= window:
            raise DomainError(f"large-theta series needs 0 < 1/2 - theta <= {window}")
        pt = _large_series(theta, gamma, prec)
    return pt


# ---------------------------------------------------------------- high genus

def log_k_factor(x, prec: int | None = None):
    """``log K(x)`` with ``K(x) = sqrt(2 pi) x^(x+1) / (e^x Gamma(x + 3/2))``."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        x = _mpf(x)
        if x <= 0:
            raise DomainError(f"K(x) needs x > 0, got {x}")
        val = (mpmath.log(2 * mpmath.pi) / 2 + (x + 1) * mpmath.log(x) - x
               - mpmath.loggamma(x + mpmath.mpf(3) / 2))
    return +val


def k_factor(x, prec: int | None = None):
    return mpmath.exp(log_k_factor(x, prec))


@dataclass(frozen=True)
class HighGenusPoint:
    gamma: mpmath.mpf
    lam: mpmath.mpf
    h: mpmath.mpf
    h_prime: mpmath.mpf
    Jtilde: mpmath.mpf
    K: mpmath.mpf | None = None

    def identity_residual(self):
        """``gamma h' - h - log(1 - 4 lambda) / 2``, which is exactly zero in theory."""
        return self.gamma * self.h_prime - self.h - mpmath.log(1 - 4 * self.lam) / 2


def high_genus_functions(gamma, prec: int | None = None, *, k_arg=None) -> HighGenusPoint:
    """h, h', J-tilde (and optionally K(k_arg)) at ``gamma = 1/2 - theta``.

    ``h(gamma) = f(1/2 - gamma) + 1 - 2 gamma - log 2 + 2 gamma log(2 gamma)``.
    h' is computed as ``-f'(1/2 - gamma) + 2 log(2 gamma)`` so that the
    identity ``gamma h' - h = log(1 - 4 lambda)/2`` is a genuine check.
    """
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        gamma = _mpf(gamma)
        if not 0 < gamma < mpmath.mpf(1) / 2:
            raise DomainError(f"gamma must lie in (0, 1/2), got {gamma}")
        theta = mpmath.mpf(1) / 2 - gamma
        lam, f, fp, _, _, _ = _interior(theta, gamma, prec)
        l2g = mpmath.log(2 * gamma)
        h = f + 1 - 2 * gamma - mpmath.log(2) + 2 * gamma * l2g
        hp = -fp + 2 * l2g
        jt = gamma / mpmath.sqrt(lam * (gamma - lam - 2 * lam * gamma))
        K = None if k_arg is None else mpmath.exp(log_k_factor(k_arg, prec))
    return HighGenusPoint(+gamma, +lam, +h, +hp, +jt, None if K is None else +K)


# ---------------------------------------------------------------- triangulations

@dataclass(frozen=True)
class TriangulationPoint:
    theta: mpmath.mpf
    h_tri: mpmath.mpf
    f_tri: mpmath.mpf
    J_tri: mpmath.mpf
    radicand: mpmath.mpf


def theta_of_h(h, prec: int | None = None):
    """``1/2 - 3h log((1+s)/(1-s)) / ((1+8h) s)`` with ``s = sqrt(1 - 4h)``."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        h = _mpf(h)
        if not 0 <= h <= mpmath.mpf(1) / 4:
            raise DomainError(f"h must lie in [0, 1/4], got {h}")
        val = _theta_tri(h)
    return +val


def _theta_tri(h):
    if h == 0:
        return mpmath.mpf(1) / 2
    u = 1 - 4 * h
    if u == 0:
        ratio = mpmath.mpf(1)
    else:
        s = mpmath.sqrt(u)
        ratio = mpmath.atanh(s) / s
    return mpmath.mpf(1) / 2 - 6 * h * ratio / (1 + 8 * h)


def triangulation_functions(theta, tol=None, prec: int | None = None) -> TriangulationPoint:
    """Solve for h(theta) and evaluate the conjectured f and J for triangulations."""
    prec = check_precision(prec)
    with mpmath.workprec(prec + _GUARD):
        theta = _mpf(theta)
        if not 0 < theta < mpmath.mpf(1) / 2:
            raise DomainError(f"theta must lie in (0, 1/2), got {theta}")
        tol = mpmath.ldexp(1, -(prec - 8)) if tol is None else _mpf(tol)

        # theta(h) decreases in h, so solve -theta(h) + theta = 0
        def fh(h):
            return theta - _theta_tri(h), -mpmath.diff(_theta_tri, h)

        h = _newton_bracketed(fh, mpmath.mpf(0), mpmath.mpf(1) / 4, mpmath.mpf(1) / 8,
                              tol * mpmath.mpf(2) ** -8)
        u = 1 - 4 * h
        s = mpmath.sqrt(u)
        f = (2 * theta * mpmath.log(6 * h / ((1 + 8 * h) * s)) - 2 * theta
             - mpmath.log(h / (1 + 8 * h) ** mpmath.mpf(1.5)))
        rad = (1 - 2 * theta) * u**2 - 12 * theta * h
        if rad <= 0:
            raise DomainError(f"J radicand non-positive at theta={theta}")
        J = u * (1 + 8 * h) ** mpmath.mpf(2.5) / (h ** mpmath.mpf(1.5) * mpmath.sqrt(rad))
    return TriangulationPoint(+theta, +h, +f, +J, +rad)


# ---------------------------------------------------------------- float64 backend

def _theta_of_u_array(u):
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u < 0.25
    us = u[small]
    acc = np.zeros_like(us)
    term = np.ones_like(us)
    for k in range(1, 80):
        term = term * us
        acc += term / (4 * k * k - 1)
    out[small] = acc
    ub = u[~small]
    s = np.sqrt(ub)
    lam = (1 - ub) / 4
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~small] = 0.5 - 2 * lam * np.arctanh(s) / s
    return out


def _gamma_of_lambda_array(lam):
    lam = np.asarray(lam, dtype=float)
    s = np.sqrt(1 - 4 * lam)
    # arctanh(s) = log((1+s)/(1-s))/2 with 1 - s = 4 lam / (1 + s), exact for tiny lam
    return lam * np.log((1 + s) ** 2 / (4 * lam)) / s


def parametric_arrays(theta, gamma=None):
    """Vectorised lambda, f and log J on float64 arrays (interior points only).

    Returns a dict with keys ``lam``, ``f``, ``log_J``.  Bisection (60 steps)
    is followed by two secant-free Newton polishes, giving about 1e-14
    relative accuracy away from the endpoints.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    gamma = 0.5 - theta if gamma is None else np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(theta <= 0) or np.any(gamma <= 0):
        raise DomainError("parametric_arrays needs 0 < theta < 1/2")
    lam = np.empty_like(theta)
    u = np.empty_like(theta)

    low = theta <= 0.25
    if np.any(low):
        t = theta[low]
        lo = np.zeros_like(t)
        hi = np.full_like(t, 0.75)
        for _ in range(60):
            mid = (lo + hi) / 2
            go_up = _theta_of_u_array(mid) < t
            lo = np.where(go_up, mid, lo)
            hi = np.where(go_up, hi, mid)
        uu = (lo + hi) / 2
        for _ in range(2):
            h = 1e-7 * np.maximum(uu, 1e-12)
            d = (_theta_of_u_array(uu + h) - _theta_of_u_array(uu - h)) / (2 * h)
            uu = uu - (_theta_of_u_array(uu) - t) / d
        u[low] = uu
        lam[low] = (1 - uu) / 4

    high = ~low
    if np.any(high):
        gm = gamma[high]
        lo = np.full_like(gm, -700.0)
        hi = np.full_like(gm, np.log(0.25))
        for _ in range(70):
            mid = (lo + hi) / 2
            go_up = _gamma_of_lambda_array(np.exp(mid)) < gm
            lo = np.where(go_up, mid, lo)
            hi = np.where(go_up, hi, mid)
        ll = (lo + hi) / 2
        for _ in range(2):
            x = np.exp(ll)
            gx = _gamma_of_lambda_array(x)
            # d gamma / d log(lambda) = -lambda theta'(lambda) = gamma - 2 theta lambda / u
            dg = gx - 2 * (0.5 - gx) * x / (1 - 4 * x)
            ll = ll - (gx - gm) / dg
        lam[high] = np.exp(ll)
        u[high] = 1 - 4 * lam[high]

    log_lam = np.log(lam)
    log_u = np.where(low, np.log(u), np.log1p(-4 * lam))
    f = -theta * log_u - 2 * gamma * log_lam + 2 * (np.log(2) - 1) * theta
    D = np.where(low, u * (1 - theta) - theta, 2 * (gamma - lam - 2 * lam * gamma))
    log_J = 0.5 * (np.log(2) - log_lam - np.log(D))
    return {"lam": lam, "f": f, "log_J": log_J}
