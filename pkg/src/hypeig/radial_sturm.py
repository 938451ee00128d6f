"""Shooting integrators for the radial eigenfunction equations.

These routines integrate the ODEs directly. They are the ground truth
that the closed-form hypergeometric and trigonometric solvers are checked
against. Four coordinate systems are used.

``rho`` (Poincare radius, ``0 <= rho < 1``)
    ``(rho**(n-1) (1-rho**2)**(2-n) f')' + C rho**(n-1) (1-rho**2)**(-n) f = 0``.
``t = rho**2 / (1 - rho**2)``
    ``t (t+1) w'' + n (t + 1/2) w' + (C/4) w = 0``.
geodesic radius ``x`` with ``rho = tanh(kappa x / 2)``
    ``f'' + (n-1) kappa coth(kappa x) f' + lam f = 0``, where ``lam = kappa**2 C / 4``.
    The code integrates ``h = exp((n-1) kappa x / 2) f``, which has the
    same zeros and does not decay. This makes long intervals, which the
    Poincare form cannot reach before ``1 - 1e-6``, cheap and accurate.
Funk distance ``sigma = -ln(1-s)``
    This form is used for the Funk-ball equation
    ``(f' (1-s)**2)' + f' (1-s)**2 (n-1)/s + lam f = 0``. In ``sigma`` it
    reads ``g'' = g' - (n-1) g' / expm1(sigma) - lam g``, which is regular
    up to the boundary.

All forms start slightly off the singular origin from the power series of
the regular solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, ParameterError
from .hypergeom import HypergeomParams, eval_2f1

__all__ = [
    "RadialODESpec",
    "ShootResult",
    "shoot",
    "shoot_hyperbolic",
    "shoot_hyperbolic_t",
    "shoot_geodesic",
    "geodesic_boundary",
    "prufer_angle",
    "is_oscillatory",
    "oscillation_zero_count",
    "shoot_funk",
    "hyperbolic_closed_form",
    "funk_closed_form",
    "RHO_CAP",
    "DIAGNOSTIC_X_MAX",
]

RTOL = 1e-10
ATOL = 1e-12
RHO_START = 1e-6
RHO_CAP = 1.0 - 1e-6
ZERO_XTOL = 1e-12
PRUFER_START = 0.01
PRUFER_RTOL = 1e-11
# Geodesic length used by the oscillation diagnostic. See is_oscillatory.
DIAGNOSTIC_X_MAX = 40.0


@dataclass(frozen=True)
class RadialODESpec:
    """Which radial equation to integrate.

    ``C_osc`` is read for ``kind == "hyperbolic_ball"`` and ``lambda_rho``
    for ``kind == "funk_ball"``.
    """

    kind: str
    n: int
    C_osc: Optional[float] = None
    lambda_rho: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("hyperbolic_ball", "funk_ball"):
            raise ParameterError(f"unknown equation kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError("n must be an integer >= 2")
        if self.kind == "hyperbolic_ball":
            if self.C_osc is None or not self.C_osc > 0:
                raise ParameterError("C_osc must be positive")
        elif self.lambda_rho is None or not 0 < self.lambda_rho < 0.25:
            raise ParameterError("lambda_rho must lie in (0, 1/4)")


@dataclass(frozen=True)
class ShootResult:
    """Outcome of one shooting run.

    Attributes
    ----------
    first_zero : float or None
        First zero of the solution in the integrated interval.
    samples : tuple of (float, float)
        Solution values at the accepted integrator steps, by increasing
        abscissa.
    oscillatory_within_domain : bool
        True when at least two sign changes occur before the end of the
        integrated interval.
    zeros : tuple of float
        Every located zero, increasing.
    end : float
        Right end actually integrated, after capping.
    """

    first_zero: Optional[float]
    samples: tuple
    oscillatory_within_domain: bool
    zeros: tuple = field(default=())
    end: float = 0.0


# ---------------------------------------------------------------------------
# helpers


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ParameterError("n must be an integer >= 2")


def _regular_series(n: int, C: float, t: float, max_terms: int = 200):
    """Regular solution ``w(t) = 2F1(.,.; n/2; -t)`` of the t-form and ``w'(t)``, for small ``t``."""
    w = 1.0
    dw = 0.0
    coef = 1.0
    tk = 1.0
    for k in range(max_terms):
        nxt = -(k * (k - 1) + n * k + 0.25 * C) / ((k + 1) * (k + 0.5 * n)) * coef
        dw += (k + 1) * nxt * tk
        tk *= t
        w += nxt * tk
        coef = nxt
        if abs(nxt * tk) <= 1e-18 * abs(w) and k > 1:
            break
    return w, dw


def _funk_series(n: int, lam: float, s: float, max_terms: int = 200):
    """Regular solution of the Funk equation with ``f(0) = -1``, and ``f'(s)``."""
    f_prev, f_cur = 0.0, -1.0  # f_{-1}, f_0
    val = -1.0
    der = 0.0
    sk = 1.0  # s**m
    for m in range(max_terms):
        nxt = (2.0 * m * (m + n - 1) * f_cur - ((m - 1) * (m + n - 1) + lam) * f_prev) / ((m + 1) * (m + n - 1))
        der += (m + 1) * nxt * sk
        sk *= s
        val += nxt * sk
        f_prev, f_cur = f_cur, nxt
        if m > 2 and abs(nxt * sk) <= 1e-18:
            break
    return val, der


def _locate_zeros(sol, y_index: int = 0):
    """Sign changes between accepted steps, refined by bisection on the dense output."""
    ts = sol.t
    ys = sol.y[y_index]
    zeros = []
    for i in range(len(ts) - 1):
        a, b = ts[i], ts[i + 1]
        fa, fb = ys[i], ys[i + 1]
        if fa == 0.0:
            if i > 0:
                zeros.append(a)
            continue
        if fa * fb < 0:
            lo, hi = a, b
            flo = fa
            while abs(hi - lo) > ZERO_XTOL:
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                fm = sol.sol(mid)[y_index]
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            zeros.append(0.5 * (lo + hi))
    return zeros


def _run(rhs: Callable, x0: float, y0, x1: float, *, dense: bool = True, rtol: float = RTOL, atol: float = ATOL):
    sol = solve_ivp(rhs, (x0, x1), y0, method="RK45", rtol=rtol, atol=atol, dense_output=dense)
    if sol.status != 0:
        raise NumericalError(f"radial integration failed: {sol.message}")
    return sol


def _result(sol, zeros, to_abscissa: Callable, value_of: Callable, end: float) -> ShootResult:
    abscissae = to_abscissa(sol.t)
    values = value_of(sol.t, sol.y)
    samples = tuple(zip(map(float, abscissae), map(float, values)))
    zs = tuple(float(to_abscissa(np.array([z]))[0]) for z in zeros)
    return ShootResult(
        first_zero=zs[0] if zs else None,
        samples=samples,
        oscillatory_within_domain=len(zs) >= 2,
        zeros=zs,
        end=float(end),
    )


# ---------------------------------------------------------------------------
# hyperbolic ball


def shoot_hyperbolic(n: int, C_osc: float, rho_max: float) -> ShootResult:
    """Integrate the Poincare-radius equation with ``f(0) = 1``, ``f'(0) = 0``.

    The integration runs on ``[1e-6, min(rho_max, 1 - 1e-6)]``.

    Examples
    --------
    >>> round(shoot_hyperbolic(3, 4 * (1 + (math.pi / 2) ** 2), 0.99).first_zero, 6)
    0.761594
    """
    _check_n(n)
    if not C_osc > 0:
        raise ParameterError("C_osc must be positive")
    if not 0 < rho_max < 1:
        raise ParameterError("rho_max must lie in (0, 1)")
    end = min(rho_max, RHO_CAP)
    if end <= RHO_START:
        raise ParameterError("rho_max is inside the series start region")

    def rhs(rho, y):
        q = 1.0 - rho * rho
        return [y[1], -((n - 1) / rho + 2.0 * (n - 2) * rho / q) * y[1] - C_osc / (q * q) * y[0]]

    rho0 = RHO_START
    t0 = rho0 * rho0 / (1.0 - rho0 * rho0)
    w, dw = _regular_series(n, C_osc, t0)
    dt_drho = 2.0 * rho0 / (1.0 - rho0 * rho0) ** 2
    sol = _run(rhs, rho0, [w, dw * dt_drho], end)
    zeros = _locate_zeros(sol)
    return _result(sol, zeros, lambda r: r, lambda t, y: y[0], end)


def shoot_hyperbolic_t(n: int, C_osc: float, rho_max: float) -> ShootResult:
    """Same problem as :func:`shoot_hyperbolic`, integrated in ``t = rho**2/(1-rho**2)``.

    Abscissae in the result are converted back to ``rho``.
    """
    _check_n(n)
    if not 0 < rho_max < 1:
        raise ParameterError("rho_max must lie in (0, 1)")
    end_rho = min(rho_max, RHO_CAP)
    t_of = lambda r: r * r / (1.0 - r * r)  # noqa: E731
    rho_of = lambda t: np.sqrt(t / (1.0 + t))  # noqa: E731

    def rhs(t, y):
        return [y[1], -(n * (t + 0.5) * y[1] + 0.25 * C_osc * y[0]) / (t * (t + 1.0))]

    t0 = t_of(RHO_START)
    w, dw = _regular_series(n, C_osc, t0)
    t_end = t_of(end_rho)
    sol = _run(rhs, t0, [w, dw], t_end)
    zeros = _locate_zeros(sol)
    return _result(sol, zeros, rho_of, lambda t, y: y[0], end_rho)


def _geodesic_setup(n: int, lam: float, kappa: float):
    p = 0.5 * (n - 1) * kappa
    C = 4.0 * lam / kappa**2

    def rhs(x, y):
        g1 = 2.0 / math.expm1(2.0 * kappa * x)
        return [y[1], -2.0 * p * g1 * y[1] - (lam - p * p - 2.0 * p * p * g1) * y[0]]

    x0 = 2.0 * math.atanh(RHO_START) / kappa
    s = math.sinh(0.5 * kappa * x0)
    w, dw = _regular_series(n, C, s * s)
    f0 = w
    df0 = dw * 0.5 * kappa * math.sinh(kappa * x0)
    g = math.exp(p * x0)
    return rhs, x0, [g * f0, g * (df0 + p * f0)], p


def shoot_geodesic(n: int, lam: float, kappa: float, x_max: float) -> ShootResult:
    """Integrate the radial equation in geodesic radius on ``(0, x_max]``.

    ``samples`` hold the unscaled profile ``f(x)``, normalised by ``f(0) = 1``.
    For large ``x_max`` these values may underflow. Zeros are found on the
    rescaled solution.
    """
    _check_n(n)
    if not (kappa > 0 and lam > 0 and x_max > 0):
        raise ParameterError("lam, kappa and x_max must be positive")
    rhs, x0, y0, p = _geodesic_setup(n, lam, kappa)
    if x_max <= x0:
        raise ParameterError("x_max is inside the series start region")
    sol = _run(rhs, x0, y0, x_max)
    zeros = _locate_zeros(sol)
    return _result(sol, zeros, lambda x: x, lambda x, y: y[0] * np.exp(-p * x), x_max)


def geodesic_boundary(n: int, lam: float, kappa: float, r: float):
    """Rescaled boundary value ``exp((n-1) kappa r / 2) f(r)`` and number of interior zeros.

    This is the function whose smallest root in ``lam`` is the first
    Dirichlet eigenvalue of the geodesic ball of radius ``r``.
    """
    rhs, x0, y0, _ = _geodesic_setup(n, lam, kappa)
    sol = _run(rhs, x0, y0, r, dense=False)
    ys = sol.y[0]
    sign_changes = int(np.count_nonzero(ys[:-1] * ys[1:] < 0))
    return float(ys[-1]), sign_changes


def prufer_angle(n: int, lam: float, kappa: float, r: float) -> float:
    """Modified Pruefer angle of the regular solution at geodesic radius ``r``.

    With ``u = f sinh(kappa x)**((n-1)/2)`` the radial equation becomes
    ``u'' + (alpha**2 - W) u = 0``, where ``W = (n-1)(n-3) kappa**2 / (4 sinh(kappa x)**2)``
    and ``alpha**2 = lam - (n-1)**2 kappa**2 / 4 > 0``. Writing
    ``u = R sin(theta)`` and ``u' = alpha R cos(theta)`` gives the
    first-order equation ``theta' = alpha - (W/alpha) sin(theta)**2``. It is
    smooth and does not oscillate. The number of zeros of ``f`` in ``(0, r)``
    is ``ceil(theta(r)/pi) - 1``, so ``f(r) = 0`` for the first time exactly
    when ``theta(r) = pi``. ``theta(r)`` increases with ``lam``.
    """
    _check_n(n)
    p = 0.5 * (n - 1) * kappa
    if not lam > p * p:
        raise ParameterError("the Pruefer form needs lam > (n-1)^2 kappa^2 / 4")
    alpha = math.sqrt(lam - p * p)
    c = 0.25 * (n - 1) * (n - 3) * kappa**2
    x0 = min(PRUFER_START / kappa, r / 100.0)
    s = math.sinh(0.5 * kappa * x0)
    w, dw = _regular_series(n, 4.0 * lam / kappa**2, s * s)
    df = dw * 0.5 * kappa * math.sinh(kappa * x0)
    theta0 = math.atan2(alpha * w, df + p / math.tanh(kappa * x0) * w)

    def rhs(x, y):
        sh = math.sinh(kappa * x)
        return [alpha - c / (alpha * sh * sh) * math.sin(y[0]) ** 2]

    sol = _run(rhs, x0, [theta0], r, dense=False, rtol=PRUFER_RTOL, atol=1e-13)
    return float(sol.y[0, -1])


def oscillation_zero_count(n: int, C_osc: float, x_max: float = DIAGNOSTIC_X_MAX) -> int:
    """Number of zeros of the regular solution within geodesic radius ``x_max`` (curvature -1)."""
    res = shoot_geodesic(n, 0.25 * C_osc, 1.0, x_max)
    return len(res.zeros)


def is_oscillatory(n: int, C_osc: float, diagnostic: bool = False):
    """Oscillation criterion ``C_osc > (n-1)**2``.

    With ``diagnostic=True`` the function returns ``(criterion, zero_count)``,
    where ``zero_count`` comes from shooting over geodesic radius
    ``DIAGNOSTIC_X_MAX``. That radius corresponds to
    ``rho = tanh(20) ~ 1 - 8.5e-18``. The Poincare cap ``1 - 1e-6`` is only
    about 14.5 in geodesic units. Near the threshold the zero spacing is
    ``2 pi / sqrt(C - (n-1)**2)``, which is about 8.9 at margin 0.5, so that
    cap can hold a single zero.
    """
    _check_n(n)
    if not C_osc > 0:
        raise ParameterError("C_osc must be positive")
    verdict = C_osc > (n - 1) ** 2
    if not diagnostic:
        return verdict
    return verdict, oscillation_zero_count(n, C_osc)


def hyperbolic_closed_form(n: int, C: float, rho: float) -> float:
    """Regular solution ``2F1(a, b; n/2; rho**2/(rho**2 - 1))`` of the Poincare-radius equation."""
    disc = (n - 1) ** 2 - C
    z = rho * rho / (rho * rho - 1.0)
    if disc < 0:
        params = HypergeomParams.radial(n, 0.5 * math.sqrt(-disc))
    else:
        sq = math.sqrt(disc)
        params = HypergeomParams.real(0.5 * (n - 1 + sq), 0.5 * (n - 1 - sq), 0.5 * n)
    return eval_2f1(params, z).value


# ---------------------------------------------------------------------------
# Funk ball


def _funk_params(n: int, lam: float) -> HypergeomParams:
    big = math.sqrt(n * n - 4.0 * lam)
    small = math.sqrt(1.0 - 4.0 * lam)
    return HypergeomParams.real(0.5 * (n - 1) + 0.5 * (big - small), 0.5 * (n - 1) - 0.5 * (big + small), n - 1.0)


def funk_closed_form(n: int, lambda_rho: float, s: float) -> float:
    """Regular solution ``-(1-s)**(-(1+sqrt(1-4 lam))/2) 2F1(A, B; n-1; s)``, equal to ``-1`` at 0."""
    beta = 0.5 * (1.0 + math.sqrt(1.0 - 4.0 * lambda_rho))
    return -((1.0 - s) ** (-beta)) * eval_2f1(_funk_params(n, lambda_rho), s).value


def shoot_funk(n: int, lambda_rho: float, rho_max: float) -> ShootResult:
    """Integrate the Funk radial equation with ``f(0) = -1`` and ``f'(0) = 0``.

    The regular solution has ``f(s) = -1 + lambda_rho s**2/(2n) + O(s**3)``.
    The integration variable is the Funk distance ``sigma = -ln(1-s)``.
    ``samples`` and zeros are reported in ``s``.
    """
    _check_n(n)
    if not 0 < lambda_rho < 0.25:
        raise ParameterError("lambda_rho must lie in (0, 1/4)")
    if not 0 < rho_max < 1:
        raise ParameterError("rho_max must lie in (0, 1)")
    end = min(rho_max, RHO_CAP)

    def rhs(sig, y):
        return [y[1], y[1] - (n - 1) * y[1] / math.expm1(sig) - lambda_rho * y[0]]

    s0 = RHO_START
    f0, df0 = _funk_series(n, lambda_rho, s0)
    sig0 = -math.log1p(-s0)
    sig_end = -math.log1p(-end)
    sol = _run(rhs, sig0, [f0, df0 * (1.0 - s0)], sig_end)
    zeros = _locate_zeros(sol)
    return _result(sol, zeros, lambda sg: -np.expm1(-np.asarray(sg)), lambda sg, y: y[0], end)


def shoot(spec: RadialODESpec, rho_max: float) -> ShootResult:
    """Dispatch on ``spec.kind``."""
    if spec.kind == "hyperbolic_ball":
        return shoot_hyperbolic(spec.n, float(spec.C_osc), rho_max)
    return shoot_funk(spec.n, float(spec.lambda_rho), rho_max)
