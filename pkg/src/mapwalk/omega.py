"""Regime-tagged asymptotic approximants log Omega(n, g) and the ratio Q = E / Omega.

Every evaluator returns a natural logarithm; exponentiation only happens in
``q_ratio``.  Values of Omega at n = 1000 are far beyond float range.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln

from ._validation import check_precision
from .errors import DomainError
from .parametric import (DEFAULT_CROSSOVER, high_genus_functions, parametric_arrays,
                         parametric_point, triangulation_functions)

__all__ = ["OmegaModel", "REGIMES", "log_omega", "log_omega_array", "q_ratio",
           "log_q_ratio", "log_omega_tilde", "log_exact"]

REGIMES = ("large_v", "small_v", "mid_v", "infinite_genus", "triangulation")


@dataclass(frozen=True)
class OmegaModel:
    """Which approximant to use, plus the numerical knobs it needs.

    ``c`` is only meaningful for ``mid_v``, where it must be given explicitly:
    a single (n, g) pair does not determine the limit of (n - 2g)/log n.
    """

    regime: str = "large_v"
    c: float | None = None
    precision: int | None = None
    crossover: float = DEFAULT_CROSSOVER

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.regime == "mid_v":
            if self.c is None or not self.c > 0:
                raise DomainError("mid_v model needs an explicit c > 0")
        object.__setattr__(self, "precision", check_precision(self.precision))

    @classmethod
    def parse(cls, text: str, precision: int | None = None) -> "OmegaModel":
        """Parse CLI names ``large``, ``small``, ``mid:c``, ``inf``, ``tri``."""
        aliases = {"large": "large_v", "small": "small_v", "inf": "infinite_genus",
                   "tri": "triangulation"}
        text = text.strip()
        if text.startswith("mid"):
            _, _, c = text.partition(":")
            if not c:
                raise DomainError("mid model needs a constant, as in 'mid:2'")
            return cls("mid_v", c=float(c), precision=precision)
        return cls(aliases.get(text, text), precision=precision)

    def in_domain(self, n: int, g: int) -> bool:
        if g < 0 or n < 1:
            return False
        if self.regime == "large_v":
            return 2 * g <= n - 1 or g == 0
        if self.regime in ("small_v", "mid_v"):
            return 2 * g <= n and n >= 2
        if self.regime == "infinite_genus":
            return 1 <= g and 2 * g <= n - 1
        return 1 <= g and 2 * g < n  # triangulation: open ray interior


def _require(model, n, g):
    if not model.in_domain(n, g):
        raise DomainError(f"(n, g)=({n}, {g}) outside the {model.regime} domain")


def _log_small_core(n, v):
    """``log(pi^-1/2 n^-3/2 2^n n!/v! log(n)^v)`` at working precision."""
    return (-mpmath.log(mpmath.pi) / 2 - mpmath.mpf(3) / 2 * mpmath.log(n) + n * mpmath.log(2)
            + mpmath.loggamma(n + 1) - mpmath.loggamma(v + 1)
            + v * mpmath.log(mpmath.log(n)))


def log_omega(model: OmegaModel, n: int, g: int):
    """Natural log of the regime's Omega(n, g) as an mpmath number."""
    _require(model, n, g)
    prec = model.precision
    with mpmath.workprec(prec + 32):
        n_ = mpmath.mpf(n)
        if model.regime == "large_v":
            if g == 0:
                val = n_ * mpmath.log(4) - mpmath.mpf(3) / 2 * mpmath.log(n_) - mpmath.log(mpmath.pi) / 2
            else:
                pt = parametric_point(mpmath.mpf(g) / n, prec, gamma=mpmath.mpf(n - 2 * g) / (2 * n),
                                      crossover=model.crossover)
                g_ = mpmath.mpf(g)
                x = n - 2 * g
                val = (-mpmath.log(2 * mpmath.sqrt(mpmath.pi)) + mpmath.log(g_) / 2
                       + g_ * mpmath.log(g_) - g_ - mpmath.loggamma(g_ + 1)
                       + (2 * g_ - 2) * mpmath.log(n_) + n_ * pt.f + mpmath.log(pt.J)
                       + _log_k(x))
        elif model.regime == "small_v":
            val = _log_small_core(n_, n - 2 * g)
        elif model.regime == "mid_v":
            c = mpmath.mpf(model.c)
            val = _log_small_core(n_, n - 2 * g) + c * mpmath.log(2) - mpmath.log(c) - mpmath.loggamma(c)
        elif model.regime == "infinite_genus":
            pt = parametric_point(mpmath.mpf(g) / n, prec, gamma=mpmath.mpf(n - 2 * g) / (2 * n),
                                  crossover=model.crossover)
            val = (-mpmath.log(2 * mpmath.sqrt(2) * mpmath.pi) + (2 * g - 2) * mpmath.log(n_)
                   + n_ * pt.f + mpmath.log(pt.J))
        else:
            tp = triangulation_functions(mpmath.mpf(g) / n, prec=prec)
            val = (-mpmath.log(4 * (3 * mpmath.pi) ** mpmath.mpf(1.5))
                   + (2 * g - mpmath.mpf(5) / 2) * mpmath.log(n_) + n_ * tp.f_tri
                   + mpmath.log(tp.J_tri))
    return +val


def _log_k(x):
    x = mpmath.mpf(x)
    return (mpmath.log(2 * mpmath.pi) / 2 + (x + 1) * mpmath.log(x) - x
            - mpmath.loggamma(x + mpmath.mpf(3) / 2))


def log_omega_array(model: OmegaModel, n, g) -> np.ndarray:
    """Float64 version of ``log_omega`` over arrays of (n, g); for walk grids.

    Accurate to roughly 1e-13 relative, which leaves about ten digits in
    log-ratios such as ``log Omega(n-1, g) - log Omega(n, g)``.
    """
    n = np.asarray(n, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    n, g = np.broadcast_arrays(n, g)
    if model.regime == "triangulation":
        raise DomainError("the triangulation model has no float64 backend")
    nf = n.astype(float)
    gf = g.astype(float)
    v = (n - 2 * g).astype(float)
    out = np.full(n.shape, np.nan)
    ok = np.vectorize(model.in_domain, otypes=[bool])(n, g) if n.size else np.zeros(0, bool)
    if not np.all(ok):
        bad = np.argwhere(~ok)[0]
        raise DomainError(f"(n, g)=({n[tuple(bad)]}, {g[tuple(bad)]}) outside the {model.regime} domain")
    if model.regime in ("small_v", "mid_v"):
        out = (-0.5 * np.log(np.pi) - 1.5 * np.log(nf) + nf * np.log(2)
               + gammaln(nf + 1) - gammaln(v + 1) + v * np.log(np.log(nf)))
        if model.regime == "mid_v":
            c = float(model.c)
            out = out + c * np.log(2) - np.log(c) - gammaln(c)
        return out
    g0 = g == 0
    if model.regime == "large_v" and np.any(g0):
        out[g0] = nf[g0] * np.log(4) - 1.5 * np.log(nf[g0]) - 0.5 * np.log(np.pi)
    pos = ~g0
    if np.any(pos):
        npos, gpos, vpos = nf[pos], gf[pos], v[pos]
        par = parametric_arrays(gpos / npos, vpos / (2 * npos))
        core = (2 * gpos - 2) * np.log(npos) + npos * par["f"] + par["log_J"]
        if model.regime == "large_v":
            log_k = (0.5 * np.log(2 * np.pi) + (vpos + 1) * np.log(vpos) - vpos
                     - gammaln(vpos + 1.5))
            out[pos] = (-np.log(2 * np.sqrt(np.pi)) + 0.5 * np.log(gpos) + gpos * np.log(gpos)
                        - gpos - gammaln(gpos + 1) + core + log_k)
        else:
            out[pos] = -np.log(2 * np.sqrt(2) * np.pi) + core
    return out


def log_exact(value: int, prec: int | None = None):
    """Log of a positive big integer at working precision (exact conversion, one rounding)."""
    if value <= 0:
        raise DomainError("log_exact needs a positive integer")
    with mpmath.workprec(check_precision(prec) + 32):
        out = mpmath.log(mpmath.mpf(value))
    return +out


def log_q_ratio(table, model: OmegaModel, n: int, g: int):
    """``log E(n, g) - log Omega(n, g)``; ``-inf`` when E is zero."""
    e = table.value(n, g)
    if e == 0:
        return mpmath.ninf
    return log_exact(e, model.precision) - log_omega(model, n, g)


def q_ratio(table, model: OmegaModel, n: int, g: int):
    """``Q(n, g) = E(n, g) / Omega(n, g)`` with E read exactly from the table."""
    e = table.value(n, g)
    if e == 0:
        return mpmath.mpf(0)
    with mpmath.workprec(model.precision + 32):
        out = mpmath.exp(log_q_ratio(table, model, n, g))
    return +out


def log_omega_tilde(n: int, v: int, prec: int | None = None):
    """Stirling-normalised high-genus approximant, in log form.

    ``n! n^(-3/2) 2^n / (sqrt(2) pi Gamma(v + 1/2)) e^(n h(gamma)) Jtilde(gamma)``
    with ``v = n + 1 - 2g`` and ``gamma = (v - 1)/(2n)``.
    """
    prec = check_precision(prec)
    if v < 2:
        raise DomainError(f"Omega-tilde needs v >= 2, got {v}")
    if (n + 1 - v) % 2 or v > n + 1:
        raise DomainError(f"v={v} is not n + 1 - 2g for an integer genus at n={n}")
    with mpmath.workprec(prec + 32):
        gamma = mpmath.mpf(v - 1) / (2 * n)
        hp = high_genus_functions(gamma, prec)
        val = (mpmath.loggamma(n + 1) - mpmath.mpf(3) / 2 * mpmath.log(n) + n * mpmath.log(2)
               - mpmath.log(mpmath.sqrt(2) * mpmath.pi) - mpmath.loggamma(v + mpmath.mpf(1) / 2)
               + n * hp.h + mpmath.log(hp.Jtilde))
    return +val
