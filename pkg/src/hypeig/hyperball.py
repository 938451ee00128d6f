"""First Dirichlet eigenvalue of geodesic balls in hyperbolic space.

The space has constant curvature ``-kappa**2`` and the ball has radius
``r``. Three independent solvers are provided.

``hypergeom_root``
    Smallest zero in ``alpha`` of
    ``2F1((n-1)/2 +/- i alpha/kappa; n/2; -sinh(kappa r / 2)**2)``.
``s_recursion``
    Odd ``n = 2l + 1`` only. Smallest zero of the elementary function
    ``S_l(alpha/kappa, kappa r)``, built from
    ``S_1 = sin(g x)/(g sinh x)`` and ``S_k = (d S_{k-1}/dx)/sinh x``.
``ode_shooting``
    Shooting on the radial equation in geodesic radius.

All three return ``lambda = (n-1)**2 kappa**2 / 4 + alpha**2``.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from .bessel import bessel_first_zero
from .errors import NumericalError, ParameterError, UnsupportedDimensionError
from .hypergeom import HypergeomParams, eval_2f1_sinh
from .radial_sturm import prufer_angle
from .roots import bisect_secant, default_root_rtol, first_sign_change

__all__ = [
    "BallSpec",
    "EigenResult",
    "METHODS",
    "K_MAX",
    "S",
    "S_scaled",
    "s_tables",
    "eigen_odd",
    "eigen_hypergeom",
    "eigen_shooting",
    "eigen",
    "omega",
    "hyperbolic_area_density",
    "hyperbolic_volume",
    "AccuracyWarning",
]

METHODS = ("hypergeom_root", "s_recursion", "ode_shooting")
K_MAX = 12
SMALL_R = 1e-3


class AccuracyWarning(UserWarning):
    """Result computed in a regime with reduced accuracy guarantees."""


@dataclass(frozen=True)
class BallSpec:
    """Geodesic ball of radius ``r`` in the space of curvature ``-kappa**2`` and dimension ``n``."""

    n: int
    kappa: float
    r: float

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ParameterError("n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        for name in ("kappa", "r"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be a positive finite number")
            object.__setattr__(self, name, val)

    @property
    def mckean(self) -> float:
        """Bottom of the spectrum of the whole space, ``(n-1)**2 kappa**2 / 4``."""
        return 0.25 * (self.n - 1) ** 2 * self.kappa**2


@dataclass(frozen=True)
class EigenResult:
    """First Dirichlet eigenvalue with provenance.

    Attributes
    ----------
    lam : float
        The eigenvalue, serialised under the key ``"lambda"``.
    alpha : float
        ``sqrt(lam - (n-1)**2 kappa**2 / 4)``.
    method : str
        One of :data:`METHODS`, or ``"small_r_expansion"`` for the
        degenerate fallback.
    residual : float
        Value of the method's boundary function at the root.
    bracket : tuple of float
        Sign-changing interval in ``alpha`` found by the initial scan.
    """

    lam: float
    alpha: float
    method: str
    residual: float
    bracket: Tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "method": self.method,
            "residual": self.residual,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
        }


def _result(spec: BallSpec, alpha: float, method: str, residual: float, bracket) -> EigenResult:
    lam = spec.mckean + alpha * alpha
    return EigenResult(float(lam), float(alpha), method, float(residual), (float(bracket[0]), float(bracket[1])))


# ---------------------------------------------------------------------------
# hyperbolic model geometry


def omega(n: int) -> float:
    """Volume of the Euclidean unit ball, from ``omega_n = 2 pi omega_{n-2} / n``."""
    if int(n) != n or n < 0:
        raise ParameterError("n must be a non-negative integer")
    val = 1.0 if n % 2 == 0 else 2.0
    for k in range(2 if n % 2 == 0 else 3, int(n) + 1, 2):
        val *= 2.0 * math.pi / k
    return val


def hyperbolic_area_density(n: int, kappa: float, rho: float) -> float:
    """Area of the geodesic sphere of radius ``rho``, ``n omega_n (sinh(kappa rho)/kappa)**(n-1)``."""
    return n * omega(n) * (math.sinh(kappa * rho) / kappa) ** (n - 1)


def hyperbolic_volume(n: int, kappa: float, r: float) -> float:
    """Volume of the geodesic ball of radius ``r``."""
    val, _ = quad(lambda s: (math.sinh(kappa * s) / kappa) ** (n - 1), 0.0, r, epsabs=0.0, epsrel=1e-13, limit=200)
    return n * omega(n) * val


# ---------------------------------------------------------------------------
# closed-form S_k tables
#
# S_k(g, x) = (1/g) * sum c(g) * T(g x) * cosh(x)**e * sinh(x)**(-m)
# with T in {sin, cos}, e in {0, 1} and integer polynomial coefficients c(g).
# Keys are (trig, e, m) with trig 0 = sin, 1 = cos. Values are coefficient lists
# indexed by the power of g.

Poly = List[int]
Table = Dict[Tuple[int, int, int], Poly]


def _poly_add(dst: Dict, key, poly: Poly, scale: int, shift: int = 0) -> None:
    cur = dst[key]
    need = len(poly) + shift
    if len(cur) < need:
        cur.extend([0] * (need - len(cur)))
    for i, c in enumerate(poly):
        cur[i + shift] += scale * c


def _build_tables(k_max: int) -> Dict[int, Table]:
    tables: Dict[int, Table] = {1: {(0, 0, 1): [1]}}
    for k in range(2, k_max + 1):
        new: Dict = defaultdict(list)
        for (trig, e, m), poly in tables[k - 1].items():
            # derivative of the trigonometric factor, then division by sinh
            if trig == 0:
                _poly_add(new, (1, e, m + 1), poly, 1, shift=1)
            else:
                _poly_add(new, (0, e, m + 1), poly, -1, shift=1)
            # derivative of cosh**e sinh**(-m), then division by sinh
            if e == 0:
                _poly_add(new, (trig, 1, m + 2), poly, -m)
            else:
                _poly_add(new, (trig, 0, m), poly, 1 - m)
                _poly_add(new, (trig, 0, m + 2), poly, -m)
        cleaned: Table = {}
        for key, poly in new.items():
            while poly and poly[-1] == 0:
                poly.pop()
            if poly:
                cleaned[key] = poly
        if max(m for (_, _, m) in cleaned) != 2 * k - 1:
            raise AssertionError("unexpected sinh power in S-table")
        tables[k] = cleaned
    return tables


_TABLES = _build_tables(K_MAX)


def s_tables() -> Dict[int, Table]:
    """Copy of the coefficient tables, keyed by ``k`` then ``(trig, e, m)``."""
    return {k: {key: list(p) for key, p in t.items()} for k, t in _TABLES.items()}


def _table(k: int) -> Table:
    if int(k) != k or k < 1:
        raise ParameterError("k must be a positive integer")
    if k > K_MAX:
        raise UnsupportedDimensionError(f"S_k tables are precomputed up to k = {K_MAX}")
    return _TABLES[int(k)]


def S_scaled(k: int, gamma: float, x: float) -> float:
    """``gamma * tanh(x)**(2k-1) * S_k(gamma, x)``, bounded in ``x``.

    Each term becomes ``c(gamma) T(gamma x) tanh(x)**(2k-1-m) sech(x)**(m-e)``,
    so nothing overflows for large ``x``. Root finding uses this form.
    """
    table = _table(k)
    th = math.tanh(x)
    sech = 1.0 / math.cosh(x) if x < 700 else 0.0
    sn = math.sin(gamma * x)
    cs = math.cos(gamma * x)
    total = 0.0
    for (trig, e, m), poly in table.items():
        c = 0.0
        for coef in reversed(poly):
            c = c * gamma + coef
        total += c * (cs if trig else sn) * th ** (2 * k - 1 - m) * sech ** (m - e)
    return total


def S(k: int, gamma: float, x: float) -> float:
    """``S_k(gamma, x)`` from the precomputed closed form.

    Raises
    ------
    UnsupportedDimensionError
        When ``k > K_MAX``.
    """
    if not (gamma > 0 and x > 0):
        raise ParameterError("gamma and x must be positive")
    return S_scaled(k, gamma, x) / (gamma * math.tanh(x) ** (2 * k - 1))


# ---------------------------------------------------------------------------
# solvers


def _small_r_guard(spec: BallSpec) -> bool:
    if spec.kappa * spec.r < SMALL_R:
        warnings.warn(
            f"kappa*r = {spec.kappa * spec.r:.3g} is below {SMALL_R}; eigenvalue is O(1/r^2) "
            "and is cross-checked against the small-radius expansion",
            AccuracyWarning,
            stacklevel=3,
        )
        return True
    return False


def _small_r_fallback(spec: BallSpec, exc: Exception) -> EigenResult:
    from .asymptotics import small_r_expansion

    lam = small_r_expansion(spec.n, spec.kappa, spec.r)
    alpha = math.sqrt(lam - spec.mckean)
    warnings.warn(f"root finding failed for tiny radius ({exc}); returning the expansion", AccuracyWarning, stacklevel=3)
    return EigenResult(lam, alpha, "small_r_expansion", float("nan"), (alpha, alpha))


def eigen_odd(spec: BallSpec) -> EigenResult:
    """Odd dimension ``n = 2l+1``: smallest zero of ``S_l(alpha/kappa, kappa r)``.

    The scan runs over ``alpha r`` in ``(0, j_{l-1/2,1}]``, extended by one
    grid step, with step ``pi/8``. The root is then refined in ``alpha``.
    """
    if spec.n % 2 == 0:
        raise ParameterError("the S-recursion applies to odd dimensions only")
    ell = (spec.n - 1) // 2
    _table(ell)
    x = spec.kappa * spec.r
    small = _small_r_guard(spec)
    try:
        j = bessel_first_zero(ell - 0.5)

        def g(alpha: float) -> float:
            return S_scaled(ell, alpha / spec.kappa, x)

        step = math.pi / 8.0
        u_grid = [1e-3] + list(np.arange(step, j + 1.5 * step, step))
        found, table = first_sign_change(g, [u / spec.r for u in u_grid])
        if found is None:
            raise NumericalError("no sign change of S_l below the Bessel bound", partial=table)
        a, fa, b, fb = found
        root, res, _ = bisect_secant(g, a, b, fa, fb)
    except NumericalError as exc:
        if small:
            return _small_r_fallback(spec, exc)
        raise
    return _result(spec, root, "s_recursion", S(ell, root / spec.kappa, x), (a, b))


def _alpha_scan_grid(spec: BallSpec, alpha_max: float):
    """Geometric steps from 1e-4 up to ``pi/(8r)``, then linear steps of ``pi/(8r)``."""
    step = math.pi / (8.0 * spec.r)
    a = 1e-4
    while a < step:
        yield a
        a *= 2.0
    k = 1
    while k * step <= alpha_max + 1e-15:
        yield k * step
        k += 1


def eigen_hypergeom(spec: BallSpec) -> EigenResult:
    """Smallest zero in ``alpha`` of the hypergeometric boundary function.

    The boundary function is
    ``g(alpha) = 2F1((n-1)/2 +/- i alpha/kappa; n/2; -sinh(kappa r/2)**2)``.

    Raises
    ------
    NumericalError
        No sign change up to four times the Bessel-based scan limit. The
        scan table is attached as ``partial``.
    """
    n = spec.n
    x = spec.kappa * spec.r
    small = _small_r_guard(spec)

    def g(alpha: float) -> float:
        return eval_2f1_sinh(HypergeomParams.radial(n, alpha / spec.kappa), x).scaled_value

    try:
        alpha_max = (bessel_first_zero(0.5 * n - 1.0) + 1.0) / spec.r
        found, table = first_sign_change(g, _alpha_scan_grid(spec, alpha_max))
        if found is None:
            step = math.pi / (8.0 * spec.r)
            extra = np.arange(table[-1][0] + step, 4.0 * alpha_max + step, step)
            found, more = first_sign_change(g, [table[-1][0]] + list(extra))
            table += more
        if found is None:
            raise NumericalError("no sign change of the boundary function", partial=table)
        a, fa, b, fb = found
        root, _, _ = bisect_secant(g, a, b, fa, fb)
    except NumericalError as exc:
        if small:
            return _small_r_fallback(spec, exc)
        raise
    residual = eval_2f1_sinh(HypergeomParams.radial(n, root / spec.kappa), x).value
    return _result(spec, root, "hypergeom_root", residual, (a, b))


def eigen_shooting(spec: BallSpec) -> EigenResult:
    """Shooting on the radial equation through its Pruefer angle.

    ``theta(r; alpha)`` increases with ``alpha``, starts at 0 and passes
    ``pi`` exactly at the first eigenvalue. The upper end of the bracket
    starts at ``(j_{n/2-1,1} + 1)/r`` and grows until ``theta >= pi``.
    """
    n, kappa, r = spec.n, spec.kappa, spec.r
    mck = spec.mckean

    def phi(alpha: float) -> float:
        return prufer_angle(n, mck + alpha * alpha, kappa, r) - math.pi

    lo, f_lo = 0.0, -math.pi
    hi = (bessel_first_zero(0.5 * n - 1.0) + 1.0) / r
    f_hi = phi(hi)
    grow = 0
    while f_hi < 0:
        lo, f_lo = hi, f_hi
        hi *= 1.5
        f_hi = phi(hi)
        grow += 1
        if grow > 60:
            raise NumericalError("shooting bracket could not be grown", partial=(lo, hi))
    bracket = (lo, hi)
    root, res, _ = bisect_secant(phi, lo, hi, f_lo, f_hi)
    return _result(spec, root, "ode_shooting", res, bracket)


def eigen(spec: BallSpec, method: Optional[str] = None) -> EigenResult:
    """Compute the first Dirichlet eigenvalue of ``spec``.

    By default, odd dimensions up to ``2*K_MAX + 1`` use the S-recursion
    and all others use the hypergeometric root. A forced ``method`` must be
    one of :data:`METHODS`.
    """
    if method is None:
        if spec.n % 2 == 1 and (spec.n - 1) // 2 <= K_MAX:
            return eigen_odd(spec)
        return eigen_hypergeom(spec)
    if method == "hypergeom_root":
        return eigen_hypergeom(spec)
    if method == "s_recursion":
        return eigen_odd(spec)
    if method == "ode_shooting":
        return eigen_shooting(spec)
    raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
