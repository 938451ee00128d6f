"""Eigenvalue comparison on radial metric-measure models.

A model is described by the area density ``A(rho)`` of metric spheres
about a base point. Balls in such a model are compared with geodesic balls
of the same radius in the space of curvature ``-kappa**2``. The test
function is the hyperbolic ground state ``R_n(d(x0, x))``. Its gradient
bound ``|R_n'| = lam sinh(kappa rho) R_{n+2} / (kappa n)`` reduces every
integral to a one-dimensional layer-cake integral against ``A``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import NumericalError, ParameterError, PreconditionError
from .hyperball import BallSpec, eigen, hyperbolic_volume, omega
from .hypergeom import HypergeomParams, eval_2f1_log_grid, eval_2f1_sinh, log1mz_from_geodesic

__all__ = [
    "RadialMeasure",
    "hyperbolic_measure",
    "euclidean_measure",
    "funk_measure",
    "tabulated_measure",
    "load_measure_csv",
    "measure_from_name",
    "HypothesisReport",
    "ComparisonReport",
    "TransplantFunctions",
    "layer_cake",
    "check_hypotheses",
    "transplant_functions",
    "find_rho0",
    "identity_residual",
    "sign_integral",
    "compare",
    "rayleigh_quotient",
    "BG_RTOL",
    "INEQUALITY_RTOL",
]

BG_RTOL = 1e-9
INEQUALITY_RTOL = 1e-8
DENSITY_PROBES = (1e-2, 1e-3, 1e-4)
DENSITY_TOL = 1e-4
BG_GRID = 1000
RIGIDITY_GRID = 100
SPLIT = 1e-3


def log_sinh(x):
    """``ln sinh(x)`` for ``x > 0`` without overflow."""
    x = np.asarray(x, dtype=float)
    big = x > 20.0
    out = np.empty_like(x)
    out[big] = x[big] - math.log(2.0) + np.log1p(-np.exp(-2.0 * x[big]))
    out[~big] = np.log(np.sinh(x[~big]))
    return out


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class RadialMeasure:
    """Radial measure about a base point, given by the log of its sphere-area density.

    Parameters
    ----------
    n : int
        Dimension used for the density normalisation ``n omega_n rho**(n-1)``.
    label : str
    log_density : callable
        Vectorised ``rho -> ln A(rho)`` for ``rho > 0``.
    volume : callable, optional
        Vectorised ``rho -> mu(B_rho)``. Falls back to quadrature of the density.
    rho_min, rho_max : float
        Interval on which the density is known. Registry entries use
        ``(0, inf)``. Tabulated entries use the table range.
    knots : ndarray, optional
        Radii where the density is only piecewise smooth (table nodes).
        Quadrature panels are split there.
    """

    n: int
    label: str
    log_density: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    volume: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    rho_min: float = 0.0
    rho_max: float = math.inf
    knots: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ParameterError("n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))

    def density(self, rho):
        return np.exp(self.log_density(np.asarray(rho, dtype=float)))

    def covers(self, r: float) -> bool:
        return self.rho_max >= r * (1.0 - 1e-12)

    def ball_volume(self, rho: float) -> float:
        """``mu(B_rho)``."""
        if self.volume is not None:
            return float(self.volume(np.asarray(rho, dtype=float)))
        return layer_cake(self, lambda s: 1.0, rho)


def hyperbolic_measure(n: int, kappa: float) -> RadialMeasure:
    """Riemannian volume of the space of curvature ``-kappa**2``.

    No closed-form ball volume is attached, so ``ball_volume`` integrates
    the density. That keeps the rigidity check independent of
    :func:`~hypeig.hyperball.hyperbolic_volume`.
    """
    c = math.log(n * omega(n)) - (n - 1) * math.log(kappa)
    return RadialMeasure(
        n,
        f"hyperbolic(n={n},kappa={kappa:g})",
        lambda rho: c + (n - 1) * log_sinh(kappa * np.asarray(rho, dtype=float)),
    )


def euclidean_measure(n: int) -> RadialMeasure:
    """Lebesgue measure, ``A = n omega_n rho**(n-1)``."""
    c = math.log(n * omega(n))
    w = omega(n)
    return RadialMeasure(
        n,
        f"euclidean(n={n})",
        lambda rho: c + (n - 1) * np.log(np.asarray(rho, dtype=float)),
        lambda rho: w * np.asarray(rho, dtype=float) ** n,
    )


def funk_measure(n: int) -> RadialMeasure:
    """Volume of Funk balls about the centre of the unit ball.

    ``mu(B_rho) = omega_n (1 - exp(-rho))**n``, so
    ``A = n omega_n (1 - exp(-rho))**(n-1) exp(-rho)``.
    """
    c = math.log(n * omega(n))
    w = omega(n)
    return RadialMeasure(
        n,
        f"funk(n={n})",
        lambda rho: c + (n - 1) * np.log(-np.expm1(-np.asarray(rho, dtype=float))) - np.asarray(rho, dtype=float),
        lambda rho: w * (-np.expm1(-np.asarray(rho, dtype=float))) ** n,
    )


def _extend_below(r: np.ndarray, r0: float, n: int, log_a):
    """``log_a`` on the table, continued as ``A(r0) (r/r0)**(n-1)`` below ``r0``."""
    inside = log_a(np.maximum(r, r0))
    with np.errstate(divide="ignore"):
        return np.where(r < r0, inside + (n - 1) * np.log(np.maximum(r, 0.0) / r0), inside)


def tabulated_measure(n: int, rho, values, *, kind: str = "density", label: str = "tabulated") -> RadialMeasure:
    """Measure from samples on a strictly increasing grid of positive radii.

    ``kind="density"`` takes samples of ``A``. They are interpolated by a
    monotone cubic (PCHIP) and ``mu`` is the exact antiderivative of that
    interpolant. The mass below the first node is added assuming
    ``A ~ rho**(n-1)`` there. ``kind="volume"`` takes samples of ``mu``
    and ``A`` is the derivative of its PCHIP interpolant.
    """
    rho = np.asarray(rho, dtype=float)
    values = np.asarray(values, dtype=float)
    if rho.ndim != 1 or rho.shape != values.shape or rho.size < 4:
        raise ParameterError("need matching one-dimensional tables with at least 4 rows")
    if not np.all(np.isfinite(rho)) or not np.all(np.isfinite(values)):
        raise ParameterError("table contains non-finite entries")
    if rho[0] <= 0 or np.any(np.diff(rho) <= 0):
        raise ParameterError("radii must be positive and strictly increasing")
    if kind == "density":
        if np.any(values <= 0):
            raise ParameterError("tabulated density must be positive")
        dens = PchipInterpolator(rho, values, extrapolate=False)
        anti = dens.antiderivative()
        head = values[0] * rho[0] / n

        def log_density(r):
            return _extend_below(np.asarray(r, dtype=float), rho[0], n, lambda x: np.log(dens(x)))

        def volume(r):
            return head + anti(np.asarray(r, dtype=float))

    elif kind == "volume":
        if np.any(values <= 0) or np.any(np.diff(values) <= 0):
            raise ParameterError("tabulated volumes must be positive and increasing")
        vol = PchipInterpolator(rho, values, extrapolate=False)
        deriv = vol.derivative()

        def log_density(r):
            return _extend_below(np.asarray(r, dtype=float), rho[0], n, lambda x: np.log(deriv(x)))

        def volume(r):
            return vol(np.asarray(r, dtype=float))

    else:
        raise ParameterError("kind must be 'density' or 'volume'")
    return RadialMeasure(n, label, log_density, volume, float(rho[0]), float(rho[-1]), rho.copy())


def load_measure_csv(path, n: int, *, kind: str = "density") -> RadialMeasure:
    """Read a two-column CSV ``rho, value`` with one header line."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParameterError(f"{path}: empty file")
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    try:
        data = np.array([[float(row[0]), float(row[1])] for row in rows])
    except (ValueError, IndexError) as exc:
        raise ParameterError(f"{path}: expected two numeric columns") from exc
    if data.size == 0:
        raise ParameterError(f"{path}: no data rows")
    return tabulated_measure(n, data[:, 0], data[:, 1], kind=kind, label=str(path))


def measure_from_name(name: str, n: int, kappa: float = 1.0) -> RadialMeasure:
    """Registry lookup for ``hyperbolic``, ``euclidean`` and ``funk``. Anything else is read as a CSV path."""
    if name == "hyperbolic":
        return hyperbolic_measure(n, kappa)
    if name == "euclidean":
        return euclidean_measure(n)
    if name == "funk":
        return funk_measure(n)
    return load_measure_csv(name, n)


# ---------------------------------------------------------------------------
# layer cake and hypotheses


def layer_cake(measure: RadialMeasure, f: Callable[[float], float], r: float) -> float:
    """``int_0^r A(rho) f(rho) d rho``, the integral of ``f(d(x0, .))`` over ``B_r``.

    The integral is linear in ``f``, so a function of bounded variation
    (a difference of two decreasing functions) needs no special treatment.
    The range is split at ``min(1e-3, r/2)`` so the ``rho**(n-1)`` behaviour
    at the origin is resolved separately.

    Raises
    ------
    NumericalError
        The adaptive rule reports a non-integrable or unresolved integrand.
    """
    if not r > 0:
        raise ParameterError("r must be positive")
    if not measure.covers(r):
        raise ParameterError(f"measure {measure.label} is only known up to rho = {measure.rho_max}")

    def g(rho: float) -> float:
        if rho <= measure.rho_min:
            return 0.0 if measure.rho_min == 0 else float(measure.density(measure.rho_min)) * f(rho) * (
                rho / measure.rho_min
            ) ** (measure.n - 1)
        return float(measure.density(rho)) * f(rho)

    split = min(SPLIT, 0.5 * r)
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            for a, b in ((0.0, split), (split, r)):
                val, _ = quad(g, a, b, epsabs=0.0, epsrel=1e-11, limit=500)
                total += val
        except IntegrationWarning as exc:
            raise NumericalError(f"layer-cake quadrature failed: {exc}", partial=total) from exc
    if not math.isfinite(total):
        raise NumericalError("layer-cake integral is not finite", partial=total)
    return total


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the local density and volume-monotonicity checks.

    ``density_ok`` is ``None`` when the density is not known near the
    origin. ``bg_violation`` is the largest relative increase of
    ``A(rho)/sinh(kappa rho)**(n-1)`` between neighbouring grid points.
    """

    density_ok: Optional[bool]
    density_limit: Optional[float]
    bg_ok: bool
    bg_violation: float
    kappa: float

    @property
    def ok(self) -> bool:
        return bool(self.density_ok) and self.bg_ok

    def failed(self) -> Optional[str]:
        if not self.density_ok:
            return "D"
        if not self.bg_ok:
            return "BG"
        return None

    def to_dict(self) -> dict:
        return {
            "density_ok": self.density_ok,
            "density_limit": self.density_limit,
            "bg_ok": self.bg_ok,
            "bg_violation": self.bg_violation,
            "kappa": self.kappa,
        }


def _density_ratio_limit(measure: RadialMeasure) -> Optional[float]:
    probes = np.array(DENSITY_PROBES)
    if measure.rho_min > probes.min():
        return None
    n = measure.n
    logs = measure.log_density(probes) - math.log(n * omega(n)) - (n - 1) * np.log(probes)
    ratio = np.exp(logs)
    # quadratic extrapolation in rho to rho = 0
    h = list(probes)
    y = list(ratio)
    for k in range(1, len(h)):
        for i in range(len(h) - k):
            y[i] = (h[i + k] * y[i] - h[i] * y[i + 1]) / (h[i + k] - h[i])
    return float(y[0])


def check_hypotheses(measure: RadialMeasure, kappa: float, r: float) -> HypothesisReport:
    """Check the local density normalisation and the monotonicity of ``A/sinh(kappa rho)**(n-1)``.

    The density limit is extrapolated from ``rho`` in ``{1e-2, 1e-3, 1e-4}``
    and must be within ``1e-4`` of 1. Monotonicity is scanned on 1000
    equally spaced radii in ``(0, r]`` with a ``1e-9`` relative allowance.
    """
    if not (kappa > 0 and r > 0):
        raise ParameterError("kappa and r must be positive")
    limit = _density_ratio_limit(measure)
    density_ok = None if limit is None else bool(abs(limit - 1.0) <= DENSITY_TOL)
    lo = max(r / BG_GRID, measure.rho_min)
    grid = np.linspace(lo, min(r, measure.rho_max), BG_GRID)
    g = measure.log_density(grid) - (measure.n - 1) * log_sinh(kappa * grid)
    rises = np.diff(g)
    violation = float(np.expm1(rises.max())) if rises.size else 0.0
    violation = max(violation, 0.0)
    return HypothesisReport(density_ok, limit, violation <= BG_RTOL, violation, float(kappa))


# ---------------------------------------------------------------------------
# transplanted hyperbolic ground state


@dataclass(frozen=True)
class TransplantFunctions:
    """Radial profiles of the hyperbolic ground state on ``B_r``.

    ``R(theta, rho) = 2F1((theta-1)/2 + i a, (theta-1)/2 - i a; theta/2; -sinh(kappa rho/2)**2)``
    with ``a = alpha/kappa``. ``R_n`` is the ground state, with
    ``R_n(0) = 1`` and ``R_n(r) = 0``. ``R_{n+2}`` is proportional to
    ``-R_n'/sinh(kappa rho)``.
    """

    spec: BallSpec
    lam: float
    alpha: float

    def _params(self, theta: int) -> HypergeomParams:
        return HypergeomParams.radial(theta, self.alpha / self.spec.kappa)

    def log_R(self, theta: int, rho) -> Tuple[np.ndarray, np.ndarray]:
        """``(mantissa, log_scale)`` with ``R = mantissa * exp(log_scale)``."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        t = np.array([log1mz_from_geodesic(self.spec.kappa * v) for v in rho])
        return eval_2f1_log_grid(self._params(theta), t)

    def R(self, theta: int, rho):
        mant, logs = self.log_R(theta, rho)
        return mant * np.exp(logs)

    def R_n(self, rho):
        return self.R(self.spec.n, rho)

    def R_n2(self, rho):
        return self.R(self.spec.n + 2, rho)

    def R_scalar(self, theta: int, rho: float) -> float:
        return eval_2f1_sinh(self._params(theta), self.spec.kappa * rho).value

    def H(self, rho):
        """``lam R_{n+2}**2 sinh(kappa rho)**2 - kappa**2 n**2 R_n**2``."""
        n, kappa = self.spec.n, self.spec.kappa
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        m2, l2 = self.log_R(n + 2, rho)
        m0, l0 = self.log_R(n, rho)
        with np.errstate(divide="ignore"):
            ls = np.where(rho > 0, log_sinh(np.where(rho > 0, kappa * rho, 1.0)), -np.inf)
        first = self.lam * m2 * m2 * np.exp(2.0 * (l2 + ls))
        return first - (kappa * n) ** 2 * m0 * m0 * np.exp(2.0 * l0)

    def H_scalar(self, rho: float) -> float:
        n, kappa = self.spec.n, self.spec.kappa
        r2 = self.R_scalar(n + 2, rho)
        r0 = self.R_scalar(n, rho)
        return self.lam * (r2 * math.sinh(kappa * rho)) ** 2 - (kappa * n * r0) ** 2

    def psi(self, measure: RadialMeasure) -> Callable[[np.ndarray], np.ndarray]:
        """``Psi(rho) = 1 - kappa**(n-1) A(rho) / (n omega_n sinh(kappa rho)**(n-1))``."""
        n, kappa = self.spec.n, self.spec.kappa
        c = (n - 1) * math.log(kappa) - math.log(n * omega(n))

        def psi(rho):
            rho = np.asarray(rho, dtype=float)
            return -np.expm1(c + measure.log_density(rho) - (n - 1) * log_sinh(kappa * rho))

        return psi


def transplant_functions(spec: BallSpec, lam: Optional[float] = None) -> TransplantFunctions:
    """Build the profiles for ``spec``. The eigenvalue is computed unless supplied."""
    if lam is None:
        lam = eigen(spec).lam
    alpha = math.sqrt(lam - spec.mckean)
    return TransplantFunctions(spec, float(lam), alpha)


def find_rho0(spec: BallSpec, tf: Optional[TransplantFunctions] = None) -> float:
    """Unique zero of ``H`` in ``(0, r)``.

    ``H(0) = -kappa**2 n**2 < 0`` and ``H(r) > 0`` because ``R_n(r) = 0``.

    Raises
    ------
    NumericalError
        ``H`` does not change sign, contradicting the monotonicity of
        ``R_n/(R_{n+2} sinh(kappa rho))``.
    """
    tf = tf or transplant_functions(spec)
    r = spec.r
    f_hi = tf.H_scalar(r)
    if not f_hi > 0:
        raise NumericalError("H(r) is not positive", partial=f_hi)
    return brentq(tf.H_scalar, 0.0, r, xtol=1e-15 * r, rtol=1e-15, maxiter=500)


# ---------------------------------------------------------------------------
# quadrature on (0, r] for products of profiles and densities


_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _gl_grid(a: float, b: float, panels: int, breaks: Optional[np.ndarray] = None):
    edges = np.linspace(a, b, panels + 1)
    if breaks is not None:
        inner = breaks[(breaks > a) & (breaks < b)]
        edges = np.unique(np.concatenate([edges, inner]))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


def _log_integrals(log_terms: Callable[[np.ndarray], Dict[str, Tuple[np.ndarray, np.ndarray]]], r: float,
                   rtol: float = 1e-12, max_panels: int = 1024, scale_with: Optional[Dict[str, str]] = None,
                   breaks: Optional[np.ndarray] = None):
    """Composite Gauss-Legendre integrals of several integrands given as ``(sign*mantissa, log)``.

    Each integrand is ``m(rho) * exp(L(rho))``. Returns ``{name: (mant, log)}``
    with ``integral = mant * exp(log)``. The panel count doubles until every
    integral is stable to ``rtol``. ``scale_with`` maps an integrand to a
    reference integrand whose size sets the convergence scale, for
    integrands that may vanish identically. Reference integrands are not
    themselves tested for convergence. ``breaks`` are extra panel edges,
    placed where an integrand is only piecewise smooth.
    """
    scale_with = scale_with or {}
    prev = None
    panels = 16
    while True:
        x, w = _gl_grid(0.0, r, panels, breaks)
        terms = log_terms(x)
        cur = {}
        size = {}
        for name, (m, L) in terms.items():
            top = float(np.max(L[np.isfinite(L)])) if np.any(np.isfinite(L)) else 0.0
            scaled = w * m * np.exp(L - top)
            cur[name] = (float(np.sum(scaled)), top)
            size[name] = float(np.sum(np.abs(scaled)))
        if prev is not None:
            worst = 0.0
            for name in cur:
                if name in scale_with.values():
                    continue
                shift = math.exp(cur[name][1] - prev[name][1])
                a = cur[name][0] * shift
                b = prev[name][0]
                # integrands that cancel to (near) zero are judged against |integrand|
                ref = scale_with.get(name, name)
                scale = max(abs(a), abs(b), size[ref] * math.exp(cur[ref][1] - prev[name][1]), 1e-300)
                worst = max(worst, abs(a - b) / scale)
            if worst <= rtol:
                return cur
        if panels >= max_panels:
            raise NumericalError("profile quadrature did not converge", partial=cur)
        prev = cur
        panels *= 2


def _profile_terms(tf: TransplantFunctions, measure: Optional[RadialMeasure]):
    """Integrands of the comparison, with weight ``A`` or, for ``measure=None``, ``sinh**(n-1)``."""
    n, kappa = tf.spec.n, tf.spec.kappa

    def terms(x):
        m0, l0 = tf.log_R(n, x)
        m2, l2 = tf.log_R(n + 2, x)
        ls = log_sinh(kappa * x)
        logw = (n - 1) * ls if measure is None else measure.log_density(x)
        return {
            "grad": (m2 * m2, 2.0 * l2 + 2.0 * ls + logw),
            "mass": (m0 * m0, 2.0 * l0 + logw),
        }

    return terms


def _ratio(res, num: str, den: str) -> float:
    return res[num][0] / res[den][0] * math.exp(res[num][1] - res[den][1])


def identity_residual(spec: BallSpec, tf: Optional[TransplantFunctions] = None) -> float:
    """Relative residual of ``lam int R_{n+2}**2 sinh**(n+1) = kappa**2 n**2 int R_n**2 sinh**(n-1)`` over ``(0, r)``."""
    tf = tf or transplant_functions(spec)
    res = _log_integrals(_profile_terms(tf, None), spec.r)
    q = tf.lam * _ratio(res, "grad", "mass") / (spec.kappa * spec.n) ** 2
    return abs(q - 1.0)


def sign_integral(measure: RadialMeasure, spec: BallSpec, tf: Optional[TransplantFunctions] = None) -> float:
    """``int_0^r Psi(rho) sinh(kappa rho)**(n-1) H(rho) d rho``.

    It is non-negative whenever ``Psi`` is non-decreasing and vanishes near
    the origin, because ``H`` changes sign once, from negative to positive,
    and integrates to zero against ``sinh**(n-1)``.
    """
    tf = tf or transplant_functions(spec)
    n, kappa = spec.n, spec.kappa
    psi = tf.psi(measure)

    def terms(x):
        h = tf.H(x)
        logw = (n - 1) * log_sinh(kappa * x)
        return {"sign": (psi(x) * h, logw), "ref": (np.abs(h), logw)}

    res = _log_integrals(terms, spec.r, scale_with={"sign": "ref"}, breaks=measure.knots)
    return res["sign"][0] * math.exp(res["sign"][1])


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of comparing a model ball with the hyperbolic ball of the same radius.

    Attributes
    ----------
    lambda_model : float
        First eigenvalue of the hyperbolic ball.
    rayleigh_upper : float
        Rayleigh quotient of ``R_n(d(x0, .))`` in the model. It bounds the
        model's first eigenvalue from above.
    inequality_ok : bool
        ``rayleigh_upper <= lambda_model (1 + 1e-8)``.
    rigidity_gap : float
        ``max |mu(B_rho)/V(rho) - 1|`` over 100 radii in ``(0, r]``.
    rho0 : float
        Sign change of ``H``.
    sign_integral : float
        Value of :func:`sign_integral`.
    """

    lambda_model: float
    rayleigh_upper: float
    inequality_ok: bool
    rigidity_gap: float
    rho0: float
    sign_integral: float
    hypotheses: HypothesisReport

    def to_dict(self) -> dict:
        return {
            "lambda_model": self.lambda_model,
            "rayleigh_upper": self.rayleigh_upper,
            "inequality_ok": self.inequality_ok,
            "rigidity_gap": self.rigidity_gap,
            "rho0": self.rho0,
            "sign_integral": self.sign_integral,
            **{f"hyp_{k}": v for k, v in self.hypotheses.to_dict().items()},
        }


def rayleigh_quotient(measure: RadialMeasure, spec: BallSpec, tf: Optional[TransplantFunctions] = None) -> float:
    """``(lam**2 / (kappa**2 n**2)) int R_{n+2}**2 sinh**2 A / int R_n**2 A`` over ``(0, r)``."""
    tf = tf or transplant_functions(spec)
    res = _log_integrals(_profile_terms(tf, measure), spec.r, breaks=measure.knots)
    return tf.lam**2 / (spec.kappa * spec.n) ** 2 * _ratio(res, "grad", "mass")


def _rigidity_gap(measure: RadialMeasure, spec: BallSpec) -> float:
    grid = np.linspace(spec.r / RIGIDITY_GRID, spec.r, RIGIDITY_GRID)
    gap = 0.0
    for rho in grid:
        v = hyperbolic_volume(spec.n, spec.kappa, float(rho))
        gap = max(gap, abs(measure.ball_volume(float(rho)) / v - 1.0))
    return gap


def compare(measure: RadialMeasure, spec: BallSpec, *, check: bool = True, rigidity: bool = True) -> ComparisonReport:
    """Compare the model ball of radius ``spec.r`` with the hyperbolic ball.

    Raises
    ------
    PreconditionError
        A hypothesis fails. ``exc.hypothesis`` is ``"D"`` or ``"BG"``.
    ParameterError
        Dimension mismatch or the measure does not cover ``(0, r]``.
    """
    if measure.n != spec.n:
        raise ParameterError(f"measure dimension {measure.n} differs from ball dimension {spec.n}")
    if not measure.covers(spec.r):
        raise ParameterError(f"measure {measure.label} is only known up to rho = {measure.rho_max}")
    hyp = check_hypotheses(measure, spec.kappa, spec.r)
    if check and not hyp.ok:
        which = hyp.failed()
        raise PreconditionError(f"hypothesis {which} fails for {measure.label}", hypothesis=which)
    tf = transplant_functions(spec)
    q = rayleigh_quotient(measure, spec, tf)
    gap = _rigidity_gap(measure, spec) if rigidity else math.nan
    rho0 = find_rho0(spec, tf)
    sgn = sign_integral(measure, spec, tf)
    return ComparisonReport(
        tf.lam, q, bool(q <= tf.lam * (1.0 + INEQUALITY_RTOL)), gap, rho0, sgn, hyp
    )
