"""Bracketed scalar root refinement shared by the eigenvalue solvers."""

from __future__ import annotations

import math
import os
from typing import Callable, Optional, Tuple

from .errors import NumericalError, ParameterError

__all__ = ["default_root_rtol", "bisect_secant", "first_sign_change"]

DEFAULT_RTOL = 1e-12
BISECT_WIDTH = 1e-6


def default_root_rtol() -> float:
    """Relative root tolerance. The ``HYPEIG_TOL`` environment variable overrides it."""
    raw = os.environ.get("HYPEIG_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_RTOL
    try:
        val = float(raw)
    except ValueError as exc:
        raise ParameterError(f"HYPEIG_TOL={raw!r} is not a number") from exc
    if not (0 < val < 1):
        raise ParameterError("HYPEIG_TOL must lie in (0, 1)")
    return val


def bisect_secant(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    f_lo: Optional[float] = None,
    f_hi: Optional[float] = None,
    *,
    rtol: Optional[float] = None,
    bisect_width: float = BISECT_WIDTH,
    maxiter: int = 400,
) -> Tuple[float, float, Tuple[float, float]]:
    """Refine a sign-changing bracket.

    The bracket is first bisected until its relative width is below
    ``bisect_width``. Illinois-modified secant steps then finish it, and
    every step keeps the root enclosed.

    Returns
    -------
    root, f(root), (lo, hi)
        ``(lo, hi)`` is the final enclosing bracket.
    """
    if rtol is None:
        rtol = default_root_rtol()
    if f_lo is None:
        f_lo = f(lo)
    if f_hi is None:
        f_hi = f(hi)
    if f_lo == 0.0:
        return lo, 0.0, (lo, lo)
    if f_hi == 0.0:
        return hi, 0.0, (hi, hi)
    if (f_lo > 0) == (f_hi > 0):
        raise NumericalError("bracket does not change sign", partial=((lo, f_lo), (hi, f_hi)))
    it = 0
    while hi - lo > bisect_width * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        it += 1
        if fm == 0.0:
            return mid, 0.0, (mid, mid)
        if (fm > 0) == (f_lo > 0):
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
        if it > maxiter:
            raise NumericalError("bisection did not reach the requested width", partial=(lo, hi))
    side = 0
    x = lo if abs(f_lo) < abs(f_hi) else hi
    fx = f_lo if x == lo else f_hi
    while it <= maxiter:
        it += 1
        x_new = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        f_new = f(x_new)
        step = abs(x_new - x)
        x, fx = x_new, f_new
        if f_new == 0.0:
            return x, 0.0, (x, x)
        if (f_new > 0) == (f_lo > 0):
            lo, f_lo = x_new, f_new
            if side == -1:
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = x_new, f_new
            if side == 1:
                f_lo *= 0.5
            side = 1
        if step <= rtol * abs(x) or hi - lo <= rtol * abs(x):
            return x, fx, (lo, hi)
    raise NumericalError("secant refinement did not converge", partial=(lo, hi))


def first_sign_change(f: Callable[[float], float], grid):
    """Scan ``grid`` in order and return ``(a, fa, b, fb, table)`` for the first sign change.

    Returns ``None`` in place of the tuple when no change occurs. The
    scanned ``table`` of ``(x, f(x))`` is returned in both cases, as
    ``(None, table)``.
    """
    table = []
    prev = None
    for x in grid:
        fx = f(x)
        table.append((x, fx))
        if not math.isfinite(fx):
            raise NumericalError("non-finite boundary function value", partial=table)
        if prev is not None and (fx == 0.0 or (fx > 0) != (prev[1] > 0)):
            return (prev[0], prev[1], x, fx), table
        if fx != 0.0:
            prev = (x, fx)
    return None, table
