"""First positive zero of the Bessel function J_nu, from its power series."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from scipy.optimize import brentq

from .errors import ParameterError

__all__ = ["scaled_bessel_j", "bessel_first_zero"]


def scaled_bessel_j(nu: float, x: float) -> float:
    """``Gamma(nu+1) (2/x)**nu J_nu(x)``, a series with the same positive zeros as ``J_nu``.

    The terms ``(-x**2/4)**k / (k! (nu+1)_k)`` alternate and, for larger
    ``x``, grow well above the final sum. The sum is therefore accumulated
    exactly in rational arithmetic (``x`` and ``nu`` are binary fractions)
    and rounded once at the end.
    """
    q = -Fraction(x) ** 2 / 4
    nu_f = Fraction(nu)
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    bound = abs(float(q))
    while True:
        k += 1
        term *= q / (k * (nu_f + k))
        total += term
        if k > bound and abs(float(term)) < 1e-20:
            return float(total)


@lru_cache(maxsize=None)
def bessel_first_zero(nu: float) -> float:
    """First positive zero ``j_{nu,1}`` of ``J_nu`` for ``nu >= 0``.

    The root is bracketed between ``nu`` (below the first zero) and a
    McMahon-type upper estimate, then refined with Brent's method to an
    absolute tolerance of 1e-14.

    Examples
    --------
    >>> round(bessel_first_zero(0.5), 12) == round(math.pi, 12)
    True
    """
    nu = float(nu)
    if not nu >= 0:
        raise ParameterError("nu must be non-negative")
    lo = max(nu, 1e-3)
    hi = nu + 1.86 * nu ** (1.0 / 3.0) + 2.5 + 0.1 * nu
    f = lambda x: scaled_bessel_j(nu, x)  # noqa: E731
    while f(lo) * f(hi) > 0:
        hi += 1.0
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
