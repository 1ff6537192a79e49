"""Hurwitz zeta and digamma functions for complex arguments.

Both use a recurrence shift to move the argument far into the right half
plane followed by an asymptotic (Euler–Maclaurin / Stirling) expansion whose
coefficients are Bernoulli numbers.
"""

import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import bernoulli

from osotoc.exceptions import DomainError

SHIFT_THRESHOLD = 20.0
ASYMPTOTIC_TERMS = 12


@lru_cache(maxsize=1)
def _even_bernoulli() -> Tuple[float, ...]:
    """B_2, B_4, ..., B_{2K}."""
    numbers = bernoulli(2 * ASYMPTOTIC_TERMS)
    return tuple(float(b) for b in numbers[2::2])


def _shift_count(q: complex) -> int:
    return max(0, math.ceil(SHIFT_THRESHOLD - q.real))


def hurwitz_zeta(p: float, q: complex) -> complex:
    """ζ(p, q) = Σ_{n≥0} (q+n)^{-p} for real p > 0, p ≠ 1 and Re q > 0.

    For 0 < p < 1 the Euler–Maclaurin form is the analytic continuation of
    the series.
    """
    p = float(p)
    q = complex(q)
    if not p > 0:
        raise DomainError(f"hurwitz_zeta needs p > 0, got {p}")
    if p == 1.0:
        raise DomainError("hurwitz_zeta has a pole at p = 1")
    if not q.real > 0:
        raise DomainError(f"hurwitz_zeta needs Re q > 0, got {q}")

    shift = _shift_count(q)
    head = complex(np.sum((q + np.arange(shift)) ** (-p))) if shift else 0j
    a = q + shift

    total = head + a ** (1.0 - p) / (p - 1.0) + 0.5 * a ** (-p)
    rising = p  # (p)_{2k-1}
    power = a ** (-p - 1.0)
    factorial = 2.0
    for k, b2k in enumerate(_even_bernoulli(), start=1):
        term = b2k / factorial * rising * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        rising *= (p + 2 * k - 1) * (p + 2 * k)
        power /= a * a
        factorial *= (2 * k + 1) * (2 * k + 2)
    return total


def digamma(q: complex) -> complex:
    """ψ(q) = d ln Γ(q)/dq for Re q > 0."""
    q = complex(q)
    if not q.real > 0:
        raise DomainError(f"digamma needs Re q > 0, got {q}")

    shift = _shift_count(q)
    correction = complex(np.sum(1.0 / (q + np.arange(shift)))) if shift else 0j
    z = q + shift

    total = np.log(z) - 0.5 / z
    inverse_square = 1.0 / (z * z)
    power = inverse_square
    for k, b2k in enumerate(_even_bernoulli(), start=1):
        term = b2k / (2 * k) * power
        total -= term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= inverse_square
    return complex(total - correction)
