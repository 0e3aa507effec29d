"""Input validation helpers shared by the public functions."""

from __future__ import annotations

import numbers
import os
from fractions import Fraction

from .errors import DomainError

DEFAULT_PRECISION = int(os.environ.get("MAPWALK_PRECISION", "256"))

try:  # gmpy2 formats integers of any size; str() stops at 4300 digits
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = None


def exact_str(value: int) -> str:
    """Decimal string of an arbitrarily large integer."""
    if _mpz is not None:
        return _mpz(value).digits(10)
    return format(int(value), "d")


def check_precision(prec):
    """Return a usable binary precision, falling back to the package default."""
    if prec is None:
        return DEFAULT_PRECISION
    prec = int(prec)
    if prec < 53:
        raise DomainError(f"precision must be at least 53 bits, got {prec}")
    return prec


def check_nonnegative_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    return value


def check_positive_int(value, name):
    value = check_nonnegative_int(value, name)
    if value == 0:
        raise DomainError(f"{name} must be >= 1")
    return value


def check_unit_half(theta, *, open_left=False, open_right=False, name="theta"):
    """Validate that ``theta`` lies in [0, 1/2] with optionally open ends."""
    if theta < 0 or theta > 0.5:
        raise DomainError(f"{name} must lie in [0, 1/2], got {theta}")
    if open_left and theta == 0:
        raise DomainError(f"{name} must be > 0")
    if open_right and theta == 0.5:
        raise DomainError(f"{name} must be < 1/2")
    return theta


def parse_ray(ray):
    """Parse a ray ``'p/q'`` (or a Fraction, or a ``(p, q)`` pair) into a Fraction.

    The ray ``p/q`` means ``g = (p/q) n``.
    """
    if isinstance(ray, Fraction):
        frac = ray
    elif isinstance(ray, tuple):
        frac = Fraction(int(ray[0]), int(ray[1]))
    else:
        text = str(ray).strip()
        if "/" in text:
            p, q = text.split("/", 1)
            frac = Fraction(int(p), int(q))
        else:
            frac = Fraction(text)
    if not 0 < frac < Fraction(1, 2):
        raise DomainError(f"ray must satisfy 0 < p/q < 1/2, got {frac}")
    return frac


def ray_points(ray, n_max, n_min=1):
    """Lattice points ``(n, g)`` on the ray ``g = ray * n`` with ``n_min <= n <= n_max``."""
    frac = parse_ray(ray)
    p, q = frac.numerator, frac.denominator
    return [(k * q, k * p) for k in range(1, n_max // q + 1) if k * q >= n_min]
