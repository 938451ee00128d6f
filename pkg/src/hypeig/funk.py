"""Funk and Klein models on the open Euclidean unit ball.

The Funk metric is a non-reversible Randers metric. Its symmetrisation is
the Klein (Beltrami-Klein) metric of curvature -1. This module evaluates
the metric, co-metric and distance formulas and the Rayleigh quotients of
explicit radial test families. It also evaluates the radial Finsler-Laplace
eigenvalue on Euclidean balls ``|x| < rho``. Together these give upper
bounds for the bottom of the spectrum of each model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from .errors import DivergenceError, NumericalError, ParameterError
from .hyperball import BallSpec, eigen, omega
from .mm_comparison import check_hypotheses, funk_measure, rayleigh_quotient
from .radial_sturm import _funk_params, shoot_funk
from .roots import bisect_secant

__all__ = [
    "FLAG_CURVATURE",
    "ric_weighted",
    "RayleighSample",
    "FrequencyReport",
    "funk_metric",
    "funk_cometric",
    "klein_metric",
    "klein_cometric",
    "polar_sup",
    "funk_distance",
    "klein_distance",
    "funk_distance_gradient",
    "beta",
    "funk_rayleigh",
    "funk_rayleigh_quadrature",
    "reversed_gradient_shells",
    "reversed_gradient_diverges",
    "klein_rayleigh",
    "klein_rayleigh_quadrature",
    "funk_boundary_value",
    "funk_lambda_rho",
    "funk_frequency_report",
    "klein_frequency_report",
    "funk_fundamental_frequency",
    "FUNK_TARGET",
    "KLEIN_TOL",
]

#: Constant flag curvature of the Funk metric. Recorded, not computed.
FLAG_CURVATURE = -0.25

FUNK_TARGET = 1e-4
KLEIN_TOL = 1e-3
COMPARISON_KAPPAS = (1.0, 0.5, 0.1, 0.01)
COMPARISON_RADIUS = 200.0
RAYLEIGH_ALPHAS = (1e-1, 1e-2, 1e-3)
LAPLACE_RHOS = (0.9, 0.99, 0.999, 0.9999, 0.99999)
KLEIN_GAMMA_OFFSETS = (1e-1, 1e-2, 1e-3, 1e-4)
SHELL_COUNT = 40
FUNK_SERIES_CAP = 1 << 25


def ric_weighted(n: int, N: float) -> float:
    """Weighted Ricci curvature ``Ric_N`` of the Funk model (a recorded value).

    ``-(n-1)/4 - (n+1)**2/(4 (N-n))`` for ``n < N < inf``, ``-(n-1)/4`` for
    ``N = inf`` and ``-inf`` for ``N = n``.
    """
    if N == math.inf:
        return -(n - 1) / 4.0
    if N == n:
        return -math.inf
    if N < n:
        raise ParameterError("N must be >= n")
    return -(n - 1) / 4.0 - (n + 1) ** 2 / (4.0 * (N - n))


# ---------------------------------------------------------------------------
# metric quantities


def _point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ParameterError("points must be one-dimensional vectors")
    if not float(x @ x) < 1.0:
        raise ParameterError("point must lie in the open unit ball")
    return x


def _vec(y, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (dim,):
        raise ParameterError("vector dimension does not match the point")
    return y


def _one_minus_sq(x: np.ndarray) -> float:
    # (1 - |x|)(1 + |x|) keeps relative accuracy as |x| -> 1
    r = float(np.linalg.norm(x))
    return (1.0 - r) * (1.0 + r)


def _gram(x: np.ndarray, y: np.ndarray) -> float:
    """``|x|^2 |y|^2 - <x,y>^2`` from the component of ``y`` orthogonal to ``x``."""
    xx = float(x @ x)
    if xx == 0.0:
        return 0.0
    perp = y - (float(x @ y) / xx) * x
    return xx * float(perp @ perp)


def _radicand(x: np.ndarray, y: np.ndarray) -> float:
    # |y|^2 - (|x|^2 |y|^2 - <x,y>^2) = |y|^2 (1 - |x|^2) + <x,y>^2
    return float(y @ y) * _one_minus_sq(x) + float(x @ y) ** 2


def funk_metric(x, y) -> float:
    """``F(x, y) = (sqrt(|y|^2 - (|x|^2 |y|^2 - <x,y>^2)) + <x,y>) / (1 - |x|^2)``."""
    x = _point(x)
    y = _vec(y, x.size)
    return (math.sqrt(_radicand(x, y)) + float(x @ y)) / _one_minus_sq(x)


def klein_metric(x, y) -> float:
    """Symmetric part ``sqrt(|y|^2 - (|x|^2 |y|^2 - <x,y>^2)) / (1 - |x|^2)``."""
    x = _point(x)
    y = _vec(y, x.size)
    return math.sqrt(_radicand(x, y)) / _one_minus_sq(x)


def funk_cometric(x, xi) -> float:
    """``F*(x, xi) = |xi| - <x, xi>``."""
    x = _point(x)
    xi = _vec(xi, x.size)
    return float(np.linalg.norm(xi)) - float(x @ xi)


def klein_cometric(x, xi) -> float:
    """``sqrt((1 - |x|^2)(|xi|^2 - <x, xi>^2))``, the dual norm of the Klein metric."""
    x = _point(x)
    xi = _vec(xi, x.size)
    one_minus = _one_minus_sq(x)
    return math.sqrt(one_minus * (float(xi @ xi) * one_minus + _gram(x, xi)))


def polar_sup(x, xi, *, samples: int = 4000, seed: int = 0) -> float:
    """``sup_{v != 0} xi(v) / F(x, v)`` by sampling directions and refining the best one.

    The quotient is homogeneous of degree 0 in ``v``. The best of
    ``samples`` random unit directions seeds a BFGS refinement.
    """
    x = _point(x)
    xi = _vec(xi, x.size)
    dim = x.size
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, dim))
    dirs = np.vstack([dirs, np.eye(dim), -np.eye(dim), xi[None, :]])
    norms = np.linalg.norm(dirs, axis=1)
    dirs = dirs[norms > 0] / norms[norms > 0, None]
    xx = float(x @ x)
    xy = dirs @ x
    rad = np.sqrt(np.maximum(1.0 - (xx - xy * xy), 0.0))
    vals = (dirs @ xi) * (1.0 - xx) / (rad + xy)
    best = dirs[int(np.argmax(vals))]

    def neg(v):
        nv = float(np.linalg.norm(v))
        if nv == 0:
            return 0.0
        return -float(xi @ v) / funk_metric(x, v)

    res = minimize(neg, best, method="BFGS", options={"gtol": 1e-12})
    return max(-float(res.fun), float(vals.max()))


def funk_distance(x1, x2) -> float:
    """Funk distance from ``x1`` to ``x2``.

    ``ln[(S - <x1, x2 - x1>) / (S - <x2, x2 - x1>)]`` with
    ``S = sqrt(|x1 - x2|^2 - (|x1|^2 |x2|^2 - <x1, x2>^2))``.
    """
    x1 = _point(x1)
    x2 = _point(x2)
    if x1.size != x2.size:
        raise ParameterError("points must have the same dimension")
    d = x2 - x1
    dd = float(d @ d)
    if dd == 0.0:
        return 0.0
    a, b, ab = float(x1 @ x1), float(x2 @ x2), float(x1 @ x2)
    s = math.sqrt(max(dd - (a * b - ab * ab), 0.0))
    return math.log((s - float(x1 @ d)) / (s - float(x2 @ d)))


def klein_distance(x1, x2) -> float:
    """Symmetrised Funk distance ``(d_F(x1, x2) + d_F(x2, x1)) / 2``."""
    return 0.5 * (funk_distance(x1, x2) + funk_distance(x2, x1))


def funk_distance_gradient(x) -> np.ndarray:
    """Gradient of ``x -> d_F(0, x) = -ln(1 - |x|)``, i.e. ``x / (|x| (1 - |x|))``."""
    x = _point(x)
    t = float(np.linalg.norm(x))
    if t == 0.0:
        raise ParameterError("the distance from the origin is not differentiable at the origin")
    return x / (t * (1.0 - t))


# ---------------------------------------------------------------------------
# Rayleigh quotients of radial test families


@dataclass(frozen=True)
class RayleighSample:
    """One Rayleigh quotient ``numerator / denominator`` for a test-family parameter."""

    parameter: float
    numerator: float
    denominator: float
    quotient: float

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "quotient": self.quotient,
        }


def beta(a: float, b: float) -> float:
    """Euler Beta function from log-Gamma values."""
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def funk_rayleigh(n: int, alpha: float) -> RayleighSample:
    """Test function ``u = -(1 - |x|)**alpha = -exp(-alpha d_F(0, x))``.

    ``F*(x, Du) = alpha (1 - |x|)**alpha`` and the Funk volume is Lebesgue
    measure. Both integrals reduce to ``n omega_n B(2 alpha + 1, n)``.
    """
    _check_n(n)
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    den = n * omega(n) * beta(2.0 * alpha + 1.0, n)
    num = alpha * alpha * den
    return RayleighSample(float(alpha), num, den, num / den)


def _radial_quad(f, e_end: float = 0.0) -> float:
    """``int_0^1 f(t) dt`` where ``f`` may behave like ``(1-t)**e_end`` at 1."""
    if e_end != 0.0:
        def g(t: float) -> float:
            t = min(t, 1.0 - 1e-12)  # the quadrature rule may sample the endpoint itself
            return f(t) / (1.0 - t) ** e_end

        val, _ = quad(g, 0.0, 1.0, weight="alg", wvar=(0.0, e_end), epsabs=0.0, epsrel=1e-12, limit=200)
        return val
    val, _ = quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def funk_rayleigh_quadrature(n: int, alpha: float) -> RayleighSample:
    """Same quotient as :func:`funk_rayleigh`, by radial quadrature of the co-metric.

    The gradient ``Du = alpha (1-t)**(alpha-1) x/t`` is fed to
    :func:`funk_cometric` at ``x = t e_1``.
    """
    _check_n(n)
    area = n * omega(n)
    e1 = np.zeros(n)
    e1[0] = 1.0

    def grad_sq(t: float) -> float:
        if t >= 1.0:
            return 0.0
        du = alpha * (1.0 - t) ** (alpha - 1.0) * e1
        return funk_cometric(t * e1, du) ** 2 * t ** (n - 1)

    num = area * _radial_quad(grad_sq, 2.0 * alpha)
    den = area * _radial_quad(lambda t: (1.0 - t) ** (2.0 * alpha) * t ** (n - 1) if t < 1.0 else 0.0, 2.0 * alpha)
    return RayleighSample(float(alpha), num, den, num / den)


def reversed_gradient_shells(n: int, alpha: float, shells: int = SHELL_COUNT) -> List[float]:
    """Energy of ``-u`` on the shells ``1 - 2**-k <= |x| <= 1 - 2**-(k+1)``, ``k = 0 .. shells-1``.

    ``F*(x, -Du) = alpha (1 - |x|)**(alpha-1) (1 + |x|)``. In ``s = 1 - |x|``
    each shell is an integral of
    ``alpha**2 n omega_n (2 - s)**2 s**(2 alpha - 2) (1 - s)**(n-1)``.
    """
    _check_n(n)
    area = n * omega(n)
    out = []
    for k in range(shells):
        lo, hi = 2.0 ** -(k + 1), 2.0**-k
        val, _ = quad(
            lambda s: (2.0 - s) ** 2 * (1.0 - s) ** (n - 1) * s ** (2.0 * alpha - 2.0),
            lo,
            hi,
            epsabs=0.0,
            epsrel=1e-12,
        )
        out.append(alpha * alpha * area * val)
    return out


def reversed_gradient_diverges(n: int, alpha: float, shells: int = SHELL_COUNT) -> bool:
    """Whether the energy of ``-u_alpha`` is infinite.

    A convergent energy has shell contributions decaying like
    ``2**(-(2 alpha - 1) k)``. The energy is declared infinite when the
    last five shells fail to shrink.
    """
    s = reversed_gradient_shells(n, alpha, shells)
    tail = s[-6:]
    return all(b >= a for a, b in zip(tail, tail[1:]))


def _klein_exponent(n: int, gamma: float) -> float:
    return gamma - 0.5 * (n + 1)


def klein_rayleigh(n: int, gamma: float) -> RayleighSample:
    """Test function ``w = exp(-gamma d_K(0, x)) = ((1-|x|)/(1+|x|))**(gamma/2)`` on the Klein model.

    The denominator is
    ``n omega_n int_0^1 (1-t)**(gamma-(n+1)/2) (1+t)**(-gamma-(n+1)/2) t**(n-1) dt``.
    The eikonal identity makes the numerator ``gamma**2`` times it.

    Raises
    ------
    DivergenceError
        ``gamma <= (n-1)/2``: the endpoint exponent is ``<= -1``.
    """
    _check_n(n)
    e = _klein_exponent(n, gamma)
    if not e > -1.0:
        raise DivergenceError(f"integrals diverge at |x| = 1 for gamma = {gamma} <= {(n - 1) / 2}")
    area = n * omega(n)
    den = area * _radial_quad(lambda t: (1.0 - t) ** e * (1.0 + t) ** (-gamma - 0.5 * (n + 1)) * t ** (n - 1), e)
    num = gamma * gamma * den
    return RayleighSample(float(gamma), num, den, num / den)


def klein_rayleigh_quadrature(n: int, gamma: float) -> RayleighSample:
    """Numerator evaluated through :func:`klein_cometric` and the derivative of ``w``."""
    base = klein_rayleigh(n, gamma)
    e = _klein_exponent(n, gamma)
    area = n * omega(n)
    e1 = np.zeros(n)
    e1[0] = 1.0

    def integrand(t: float) -> float:
        if t >= 1.0:
            return 0.0
        dw = -0.5 * gamma * ((1.0 - t) / (1.0 + t)) ** (0.5 * gamma - 1.0) * 2.0 / (1.0 + t) ** 2
        return klein_cometric(t * e1, dw * e1) ** 2 * (1.0 - t * t) ** (-0.5 * (n + 1)) * t ** (n - 1)

    num = area * _radial_quad(integrand, e)
    return RayleighSample(float(gamma), num, base.denominator, num / base.denominator)


# ---------------------------------------------------------------------------
# Finsler-Laplace eigenvalue on Euclidean balls


def funk_boundary_value(n: int, lam: float, rho: float) -> Tuple[float, float]:
    """``2F1(A, B; n-1; rho)`` for the radial Funk eigenfunction, with an error bound.

    ``A = (n-1)/2 + (sqrt(n^2 - 4 lam) - sqrt(1 - 4 lam))/2`` and
    ``B = (n-1)/2 - (sqrt(n^2 - 4 lam) + sqrt(1 - 4 lam))/2``. For
    ``0 < lam < 1/4`` one has ``-1 < B < 0``. So every term after the
    linear one has the same sign, and the series is split there. The tail
    shrinks slowly near ``rho = 1`` (terms fall like ``k**-2 rho**k``).
    It is summed in numpy chunks with compensated accumulation, and the
    loop stops once a geometric bound on the remainder falls below
    ``1e-17`` times the sum of absolute terms.

    Returns
    -------
    value, error_bound
    """
    if not 0.0 < lam < 0.25:
        raise ParameterError("lam must lie in (0, 1/4)")
    if not 0.0 < rho < 1.0:
        raise ParameterError("rho must lie in (0, 1)")
    p = _funk_params(n, lam)
    a, b, c = p.a_re, float(p.b_re), p.c
    head = 1.0 + a * b / c * rho
    # second-order term and onwards
    t2 = a * b / c * rho * (a + 1.0) * (b + 1.0) / ((c + 1.0) * 2.0) * rho
    parts: List[float] = []
    last = t2
    k0 = 2
    abs_head = 1.0 + abs(a * b / c * rho)
    chunk = 1 << 16
    while True:
        k = np.arange(k0, k0 + chunk, dtype=float)
        ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * rho
        terms = last * np.concatenate(([1.0], np.cumprod(ratios[:-1])))
        parts.append(math.fsum(terms))
        last = float(terms[-1] * ratios[-1])
        kk = k0 + chunk
        r_sup = rho  # ratios increase towards rho from below
        bound = abs(last) / (1.0 - r_sup)
        total_abs = abs_head + abs(math.fsum(parts))
        if bound <= 1e-17 * total_abs:
            break
        k0 = kk
        if k0 >= FUNK_SERIES_CAP:
            raise NumericalError("Funk boundary series did not converge", partial=head + math.fsum(parts))
    tail = math.fsum(parts)
    return head + tail, bound + 4.0 * np.finfo(float).eps * total_abs


def funk_lambda_rho(n: int, rho: float, *, scan_points: int = 60) -> Optional[float]:
    """Smallest ``lam`` in ``(0, 1/4)`` with ``funk_boundary_value(n, lam, rho) = 0``.

    At ``lam -> 0`` the boundary value tends to ``1 - rho > 0``. The
    interval is scanned on a geometric grid and the first sign change is
    refined. Returns ``None`` when no root exists below ``1/4``. That
    happens for small ``rho``, where the eigenvalue leaves the range in
    which the closed form is valid.
    """
    _check_n(n)
    if not 0.0 < rho < 1.0:
        raise ParameterError("rho must lie in (0, 1)")

    def g(lam: float) -> float:
        return funk_boundary_value(n, lam, rho)[0]

    lo_lam = 1e-3 * min(1.0 - rho, 0.01)
    hi_lam = 0.25 * (1.0 - 1e-12)
    grid = np.geomspace(lo_lam, hi_lam, scan_points)
    prev = (grid[0], g(grid[0]))
    if prev[1] <= 0:
        raise NumericalError("boundary value is not positive at the bottom of the scan", partial=prev)
    for lam in grid[1:]:
        val = g(lam)
        if val <= 0:
            root, _, _ = bisect_secant(g, prev[0], lam, prev[1], val)
            return float(root)
        prev = (lam, val)
    return None


def laplace_shooting_check(n: int, lam: float, rho: float) -> float:
    """First zero of the integrated radial equation at ``lam``. It should equal ``rho``."""
    res = shoot_funk(n, lam, min(1.0 - 0.5 * (1.0 - rho), 1.0 - 1e-6))
    if res.first_zero is None:
        raise NumericalError("shooting found no zero", partial=res)
    return res.first_zero


# ---------------------------------------------------------------------------
# drivers


@dataclass(frozen=True)
class FrequencyReport:
    """Upper bounds for the bottom of the spectrum, one per proof route.

    ``bound`` is the smallest of them. ``ok`` records whether it meets the
    model's target: below :data:`FUNK_TARGET` for Funk, or within
    :data:`KLEIN_TOL` of ``(n-1)**2/4`` for Klein.
    """

    model: str
    n: int
    bound: float
    tightest_route: str
    routes: Dict[str, float]
    target: float
    ok: bool
    details: Dict[str, list] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "n": self.n,
            "bound": self.bound,
            "tightest_route": self.tightest_route,
            "target": self.target,
            "ok": self.ok,
        }
        for k, v in self.routes.items():
            out[f"route_{k}"] = v
        return out


def _comparison_route(n: int, kappas: Sequence[float], r: float):
    meas = funk_measure(n)
    rows = []
    for kappa in kappas:
        spec = BallSpec(n, kappa, r)
        hyp = check_hypotheses(meas, kappa, r)
        if not hyp.ok:
            raise NumericalError(f"Funk measure fails hypothesis {hyp.failed()} at kappa={kappa}")
        lam_model = eigen(spec).lam
        q = rayleigh_quotient(meas, spec)
        rows.append((kappa, lam_model, q))
    # diagonal estimate: the model eigenvalue is affine in kappa**2 to leading order
    (k1, l1, _), (k2, l2, _) = rows[-2], rows[-1]
    extrap = l2 - (l1 - l2) / (k1 * k1 - k2 * k2) * k2 * k2
    return min(min(row[1], row[2]) for row in rows), {"rows": rows, "kappa2_extrapolation": extrap}


def _rayleigh_route(n: int, alphas: Iterable[float]):
    samples = [funk_rayleigh(n, a) for a in alphas]
    return min(s.quotient for s in samples), {"samples": [s.to_dict() for s in samples]}


def _laplace_route(n: int, rhos: Iterable[float], target: float):
    rows = []
    best = math.inf
    for rho in rhos:
        lam = funk_lambda_rho(n, rho)
        rows.append((rho, lam))
        if lam is not None:
            best = min(best, lam)
            if best <= 0.1 * target:
                break
    return best, {"rows": rows}


def funk_frequency_report(n: int, *, routes: Sequence[str] = ("comparison", "rayleigh", "laplace")) -> FrequencyReport:
    """Bound ``lambda_1`` of the Funk model from above by each proof route."""
    _check_n(n)
    values: Dict[str, float] = {}
    details: Dict[str, list] = {}
    for route in routes:
        if route == "comparison":
            values[route], details[route] = _comparison_route(n, COMPARISON_KAPPAS, COMPARISON_RADIUS)
        elif route == "rayleigh":
            values[route], details[route] = _rayleigh_route(n, RAYLEIGH_ALPHAS)
        elif route == "laplace":
            values[route], details[route] = _laplace_route(n, LAPLACE_RHOS, FUNK_TARGET)
        else:
            raise ParameterError(f"unknown route {route!r}")
    best = min(values, key=values.get)
    bound = values[best]
    return FrequencyReport("funk", n, bound, best, values, FUNK_TARGET, bound <= FUNK_TARGET, details)


def klein_frequency_report(n: int) -> FrequencyReport:
    """Bound ``lambda_1`` of the Klein model from above with ``w_gamma``, ``gamma`` just above ``(n-1)/2``.

    A second route uses the hyperbolic ball of radius 200 (the Klein
    model has curvature -1).
    """
    _check_n(n)
    g0 = 0.5 * (n - 1)
    samples = [klein_rayleigh(n, g0 + d) for d in KLEIN_GAMMA_OFFSETS]
    values = {
        "rayleigh": min(s.quotient for s in samples),
        "geodesic_ball": eigen(BallSpec(n, 1.0, COMPARISON_RADIUS)).lam,
    }
    best = min(values, key=values.get)
    exact = g0 * g0
    return FrequencyReport(
        "klein", n, values[best], best, values, exact, abs(values[best] - exact) <= KLEIN_TOL,
        {"rayleigh": [s.to_dict() for s in samples]},
    )


def funk_fundamental_frequency(n: int) -> float:
    """Certified upper bound for the Funk model's bottom of spectrum.

    Raises
    ------
    NumericalError
        The tightest bound exceeds :data:`FUNK_TARGET`.
    """
    rep = funk_frequency_report(n)
    if not rep.ok:
        raise NumericalError(f"best bound {rep.bound:.3g} ({rep.tightest_route}) exceeds {FUNK_TARGET}", partial=rep)
    return rep.bound


def _check_n(n: int) -> None:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ParameterError("n must be an integer >= 2")
