"""Gauss hypergeometric function on the non-positive real axis.

The evaluator covers two parameter families:

* real triples ``(a, b; c)``;
* conjugate pairs ``a, b = p +/- i*alpha`` with real ``c``. Here every
  Taylor coefficient is real, because ``(a+k)(b+k) = (p+k)**2 + alpha**2``.

Evaluation picks one of three strategies from the argument ``z``:

``series``
    The defining power series, used for ``-1 < z <= 0`` (and for
    ``0 < z < 1``, which only the Funk eigenvalue condition needs).
``pfaff_series``
    ``F(a,b;c;z) = (1-z)**(-a) F(a, c-b; c; w)`` with ``w = z/(z-1)``.
    Used while ``w <= 0.95``.
``ode_continuation``
    Integration of the hypergeometric equation in the variable
    ``t = ln(1-z)``, starting from the anchor ``z = -3``. The unknown is
    rescaled by ``exp(p t)``, where ``p`` is the smaller real part of
    ``a, b``. This keeps the integration free of underflow for arguments
    such as ``-sinh(x/2)**2`` with ``x`` in the hundreds.

Large arguments are best passed through :func:`eval_2f1_sinh` or
:func:`eval_2f1_log`. These take ``t = ln(1-z)`` directly and report the
value as ``scaled_value * exp(log_scale)``, so callers that only need the
sign never see underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, ParameterError

__all__ = [
    "HypergeomParams",
    "EvalReport",
    "eval_2f1",
    "eval_2f1_log",
    "eval_2f1_sinh",
    "eval_2f1_derivative",
    "eval_2f1_log_grid",
    "log1mz_from_geodesic",
    "ratio_cf",
    "SERIES_TOL",
    "MAX_TERMS",
]

SERIES_TOL = 1e-16
MAX_TERMS = 1_000_000
PFAFF_LIMIT = 0.95
# |z| above which the direct series hands over to Pfaff. The direct series
# converges only algebraically as z -> -1, while w = z/(z-1) stays <= 1/2.
SERIES_LIMIT = 0.5
ANCHOR_Z = -3.0
ODE_RTOL = 1e-13
# Beyond this value of t = ln(1-z) the ODE coefficients equal their limits
# to double precision (exp(-40) ~ 4e-18) and the solution is propagated in
# closed form.
ASYMPTOTIC_T = 40.0
IMAG_RTOL = 1e-12
CANCEL_RTOL = 1e-14
_EPS = np.finfo(float).eps
_LONG_SERIES_CHUNK = 1 << 16
_STRATEGIES = ("series", "pfaff_series", "ode_continuation")


@dataclass(frozen=True)
class HypergeomParams:
    """Parameter triple ``(a, b; c)``.

    When ``a_im > 0`` the second parameter is the complex conjugate of the
    first and ``b_re`` must be left unset. When ``a_im == 0`` both
    parameters are real and ``b_re`` is required.
    """

    a_re: float
    a_im: float = 0.0
    c: float = 1.0
    b_re: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("a_re", "a_im", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if self.a_im < 0:
            raise ParameterError("a_im must be non-negative")
        if self.c <= 0 and float(self.c).is_integer():
            raise ParameterError(f"c = {self.c} is zero or a negative integer")
        if self.a_im > 0:
            if self.b_re is not None:
                raise ParameterError("b_re is implied by conjugation when a_im > 0")
        else:
            if self.b_re is None:
                raise ParameterError("b_re is required for real parameters")
            if not math.isfinite(self.b_re):
                raise ParameterError("b_re must be finite")

    @classmethod
    def real(cls, a: float, b: float, c: float) -> "HypergeomParams":
        return cls(a_re=float(a), a_im=0.0, c=float(c), b_re=float(b))

    @classmethod
    def conjugate(cls, p: float, alpha: float, c: float) -> "HypergeomParams":
        """Pair ``p +/- i alpha`` with third parameter ``c``.

        ``alpha == 0`` is accepted and produces the real triple ``(p, p; c)``.
        """
        if alpha == 0:
            return cls.real(p, p, c)
        return cls(a_re=float(p), a_im=abs(float(alpha)), c=float(c))

    @classmethod
    def radial(cls, theta: float, alpha: float) -> "HypergeomParams":
        """Parameters ``((theta-1)/2 +/- i alpha; theta/2)`` of a radial profile."""
        return cls.conjugate(0.5 * (theta - 1.0), alpha, 0.5 * theta)

    @property
    def is_conjugate(self) -> bool:
        return self.a_im > 0

    @property
    def a(self) -> complex | float:
        return complex(self.a_re, self.a_im) if self.is_conjugate else self.a_re

    @property
    def b(self) -> complex | float:
        return complex(self.a_re, -self.a_im) if self.is_conjugate else float(self.b_re)

    @property
    def ab(self) -> float:
        """Real product ``a*b``."""
        if self.is_conjugate:
            return self.a_re * self.a_re + self.a_im * self.a_im
        return self.a_re * float(self.b_re)

    @property
    def apb(self) -> float:
        """Real sum ``a+b``."""
        if self.is_conjugate:
            return 2.0 * self.a_re
        return self.a_re + float(self.b_re)

    @property
    def decay_rate(self) -> float:
        """Smaller real part of ``a, b``, the rate of decay in ``ln(1-z)``."""
        if self.is_conjugate:
            return self.a_re
        return min(self.a_re, float(self.b_re))

    def shifted(self) -> "HypergeomParams":
        """Parameters ``(a+1, b+1; c+1)`` used by the derivative formula."""
        if self.is_conjugate:
            return HypergeomParams(self.a_re + 1.0, self.a_im, self.c + 1.0)
        return HypergeomParams.real(self.a_re + 1.0, float(self.b_re) + 1.0, self.c + 1.0)

    def terminating_degree(self) -> Optional[int]:
        """Degree of the polynomial when ``a`` or ``b`` is a non-positive integer."""
        if self.is_conjugate:
            return None
        degrees = [int(-v) for v in (self.a_re, float(self.b_re)) if v <= 0 and float(v).is_integer()]
        return min(degrees) if degrees else None


@dataclass(frozen=True)
class EvalReport:
    """Result of one evaluation.

    ``value`` equals ``scaled_value * exp(log_scale)``. For the two series
    strategies ``log_scale`` is zero. ``value`` may underflow to zero far
    out on the axis, while ``scaled_value`` keeps the sign and mantissa.
    """

    value: float
    est_error: float
    strategy: str
    terms_or_steps: int
    scaled_value: float = 0.0
    log_scale: float = 0.0


# ---------------------------------------------------------------------------
# series kernels


def _sum_series(a, b, c: float, z, cap: int = MAX_TERMS):
    """Sum the power series with incremental Pochhammer products.

    Returns ``(sum, tail_estimate, n_terms, sum_of_abs_terms)``. The loop
    stops once two consecutive terms fall below ``SERIES_TOL`` times the
    partial sum.
    """
    total = 1.0
    term = 1.0
    abs_total = 1.0
    small = 0
    k = 0
    while True:
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0)) * z)
        k += 1
        total += term
        mag = abs(term)
        abs_total += mag
        if mag <= SERIES_TOL * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        if k >= cap:
            raise NumericalError(
                f"hypergeometric series did not converge within {cap} terms",
                partial=total,
            )
    ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1.0)) * z)
    tail = mag * ratio / (1.0 - ratio) if ratio < 1.0 else mag
    return total, tail, k, abs_total


def _sum_series_long(a: float, b: float, c: float, z: float, cap: int = MAX_TERMS):
    """Chunked numpy version of :func:`_sum_series` for slowly convergent real series.

    Terms come from cumulative products of the term ratios. The final sum
    uses compensated (``math.fsum``) accumulation because late terms can be
    many orders of magnitude below the leading ones and may alternate.
    """
    chunks = [np.array([1.0])]
    last = 1.0
    running = 1.0
    k0 = 0
    prev_small = False
    while True:
        k = np.arange(k0, k0 + _LONG_SERIES_CHUNK, dtype=float)
        ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        terms = last * np.cumprod(ratios)
        partial = running + np.cumsum(terms)
        small = np.abs(terms) <= SERIES_TOL * np.abs(partial)
        pair = small[1:] & small[:-1]
        if prev_small and small[0]:
            stop = 0
        elif pair.any():
            stop = int(np.argmax(pair)) + 1
        else:
            stop = None
        if stop is not None:
            chunks.append(terms[: stop + 1])
            n_terms = k0 + stop + 1
            break
        chunks.append(terms)
        k0 += _LONG_SERIES_CHUNK
        if k0 >= cap:
            raise NumericalError(
                f"hypergeometric series did not converge within {cap} terms",
                partial=math.fsum(np.concatenate(chunks)),
            )
        last = float(terms[-1])
        running = float(partial[-1])
        prev_small = bool(small[-1])
    allterms = np.concatenate(chunks)
    total = math.fsum(allterms)
    mag = abs(float(allterms[-1]))
    kk = float(n_terms)
    ratio = abs((a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z)
    tail = mag * ratio / (1.0 - ratio) if ratio < 1.0 else mag
    return total, tail, n_terms, float(np.sum(np.abs(allterms)))


def _series_value(params: HypergeomParams, z: float):
    """Direct series at ``z`` (``|z| < 1`` or a terminating polynomial)."""
    if not params.is_conjugate and abs(z) > 0.9:
        s, tail, k, abs_sum = _sum_series_long(params.a_re, float(params.b_re), params.c, z)
    else:
        s, tail, k, abs_sum = _sum_series(params.a, params.b, params.c, z)
    if params.is_conjugate:
        s = s.real if isinstance(s, complex) else s
    s = float(s)
    err = float(tail + 8.0 * _EPS * abs_sum)
    return s, err, k


def _pfaff_value(params: HypergeomParams, t: float):
    """Pfaff-transformed series. Returns ``(mantissa, log_scale, err, terms)``.

    The value equals ``mantissa * exp(log_scale)``, with ``log_scale = -a_re t``.
    """
    w = -math.expm1(-t)
    a = params.a
    cmb = params.c - params.b
    s, tail, k, abs_sum = _sum_series(a, cmb, params.c, w)
    log_scale = -params.a_re * t
    if params.is_conjugate:
        phase = complex(math.cos(params.a_im * t), -math.sin(params.a_im * t))
        full = phase * s
        scale = abs_sum
        if abs(full.imag) > IMAG_RTOL * scale:
            raise NumericalError(
                "imaginary residue of conjugate-pair evaluation exceeds tolerance",
                partial=full,
            )
        mant = full.real
    else:
        mant = float(s)
    err = float(tail + 8.0 * _EPS * abs_sum)
    return float(mant), log_scale, err, k


# ---------------------------------------------------------------------------
# ODE continuation


def _anchor_state(params: HypergeomParams):
    """Scaled state ``(v, v_t)`` at the anchor ``t_a = ln(1 - ANCHOR_Z)``."""
    t_a = math.log1p(-ANCHOR_Z)
    p = params.decay_rate
    m0, ls0, e0, _ = _pfaff_value(params, t_a)
    sh = params.shifted()
    m1, ls1, e1, _ = _pfaff_value(sh, t_a)
    u = m0 * math.exp(ls0)
    du_dz = params.ab / params.c * m1 * math.exp(ls1)
    u_t = -(1.0 - ANCHOR_Z) * du_dz
    g = math.exp(p * t_a)
    v = g * u
    v_t = g * (u_t + p * u)
    rel = (e0 + abs(params.ab / params.c) * e1) / max(abs(m0) + abs(m1), 1e-300)
    return t_a, v, v_t, rel


def _ode_rhs_factory(params: HypergeomParams):
    p = params.decay_rate
    apb = params.apb
    ab = params.ab
    c = params.c

    def rhs(t, y):
        em1 = math.expm1(t)
        inv = 1.0 / em1
        big_b = apb + c * inv
        big_a = ab * (1.0 + inv)
        return [y[1], (2.0 * p - big_b) * y[1] + (big_b * p - p * p - big_a) * y[0]]

    return rhs


def _propagate_limit(params: HypergeomParams, v: float, dv: float, dt: np.ndarray) -> np.ndarray:
    """Closed-form solution of the limiting constant-coefficient equation."""
    if params.is_conjugate:
        alpha = params.a_im
        return v * np.cos(alpha * dt) + dv / alpha * np.sin(alpha * dt)
    d = params.apb - 2.0 * params.decay_rate
    if d == 0.0:
        return v + dv * dt
    return v - dv * np.expm1(-d * dt) / d


def _integrate(rhs, t0: float, y0, targets: np.ndarray, amp: float):
    """Integrate from ``t0`` and return the state at every target (any order)."""
    uniq, inverse = np.unique(targets, return_inverse=True)
    forward = uniq[-1] > t0
    t_eval = uniq if forward else uniq[::-1]
    sol = solve_ivp(
        rhs,
        (t0, float(t_eval[-1])),
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=ODE_RTOL,
        atol=1e-15 * amp,
    )
    if sol.status != 0:
        raise NumericalError(f"hypergeometric ODE continuation failed: {sol.message}")
    ys = sol.y if forward else sol.y[:, ::-1]
    return ys[:, inverse], int(sol.nfev)


def _ode_values(params: HypergeomParams, t_targets: np.ndarray):
    """Scaled values ``exp(p t) F`` at each target, from one integration."""
    t_a, v0, dv0, rel0 = _anchor_state(params)
    t_targets = np.asarray(t_targets, dtype=float)
    out = np.empty_like(t_targets)
    steps = 0
    amp = max(abs(v0), abs(dv0), 1e-300)
    rhs = _ode_rhs_factory(params)

    back = t_targets < t_a
    if back.any():
        y, nfev = _integrate(rhs, t_a, [v0, dv0], t_targets[back], amp)
        out[back] = y[0]
        steps += nfev
    fwd = ~back
    if fwd.any():
        tt = t_targets[fwd]
        near = np.minimum(tt, ASYMPTOTIC_T)
        far = tt > ASYMPTOTIC_T
        grid = np.append(near, ASYMPTOTIC_T) if far.any() else near
        grid_nonanchor = grid > t_a
        y = np.empty((2, grid.size))
        y[0, ~grid_nonanchor] = v0
        y[1, ~grid_nonanchor] = dv0
        if grid_nonanchor.any():
            y[:, grid_nonanchor], nfev = _integrate(rhs, t_a, [v0, dv0], grid[grid_nonanchor], amp)
            steps += nfev
        vals = y[0, : tt.size].copy()
        if far.any():
            vals[far] = _propagate_limit(params, y[0, -1], y[1, -1], tt[far] - ASYMPTOTIC_T)
        out[fwd] = vals
    err = float((rel0 + 1e-12) * amp)
    return out, err, steps


# ---------------------------------------------------------------------------
# public evaluators


def _choose_strategy(t: float) -> str:
    if t <= math.log1p(SERIES_LIMIT):
        return "series"
    w = -math.expm1(-t)
    return "pfaff_series" if w <= PFAFF_LIMIT else "ode_continuation"


def eval_2f1_log(params: HypergeomParams, t: float, strategy: Optional[str] = None,
                 z: Optional[float] = None) -> EvalReport:
    """Evaluate at ``z = 1 - exp(t)``, given ``t = ln(1 - z) >= 0``.

    Parameters
    ----------
    params : HypergeomParams
    t : float
        Logarithmic argument, non-negative.
    strategy : str, optional
        Force ``"series"``, ``"pfaff_series"`` or ``"ode_continuation"``.
    z : float, optional
        Exact argument when known. It is used by the direct series to
        avoid the round trip through ``t``.
    """
    if not (t >= 0.0) or not math.isfinite(t):
        raise ParameterError(f"logarithmic argument must be finite and >= 0, got {t}")
    auto = strategy is None
    if auto:
        strategy = _choose_strategy(t)
    if strategy not in _STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}")
    if t == 0.0:
        return EvalReport(1.0, 0.0, strategy, 0, 1.0, 0.0)
    if strategy == "series":
        zz = -math.expm1(t) if z is None else z
        if zz <= -1.0 and params.terminating_degree() is None:
            raise ParameterError("direct series requires |z| < 1")
        val, err, k = _series_value(params, zz)
        if auto and err > CANCEL_RTOL * abs(val):
            # heavy cancellation in the direct series; the Pfaff series at
            # w = z/(z-1) < 1/2 usually cancels far less
            alt = eval_2f1_log(params, t, strategy="pfaff_series")
            if alt.est_error < err:
                return alt
        return EvalReport(val, err, strategy, k, val, 0.0)
    if strategy == "pfaff_series":
        mant, ls, err, k = _pfaff_value(params, t)
        scale = math.exp(ls)
        return EvalReport(mant * scale, err * scale, strategy, k, mant, ls)
    vals, err, steps = _ode_values(params, np.array([t]))
    ls = -params.decay_rate * t
    scale = math.exp(ls)
    mant = float(vals[0])
    return EvalReport(mant * scale, err * scale, strategy, steps, mant, ls)


def eval_2f1(params: HypergeomParams, z: float, strategy: Optional[str] = None) -> EvalReport:
    """Evaluate ``2F1(a, b; c; z)`` for real ``z <= 0``.

    Arguments in ``(0, 1)`` are accepted through the direct series. ``z = 1``
    is accepted only when the series terminates.

    Raises
    ------
    ParameterError
        Invalid argument, or a forced strategy that does not apply.
    NumericalError
        Series cap reached (``partial`` holds the partial sum) or ODE failure.
    """
    z = float(z)
    if math.isnan(z):
        raise ParameterError("z is NaN")
    if z == 0.0:
        return EvalReport(1.0, 0.0, strategy or "series", 0, 1.0, 0.0)
    if z > 0.0:
        if z > 1.0:
            raise ParameterError("z > 1 lies on the branch cut")
        if z == 1.0 and params.terminating_degree() is None:
            raise ParameterError("z = 1 is supported only for terminating series")
        if strategy not in (None, "series"):
            raise ParameterError("only the direct series applies for z > 0")
        val, err, k = _series_value(params, z)
        return EvalReport(val, err, "series", k, val, 0.0)
    if math.isinf(z):
        raise ParameterError("z must be finite; use eval_2f1_log for extreme arguments")
    return eval_2f1_log(params, math.log1p(-z), strategy=strategy, z=z)


def log1mz_from_geodesic(x: float) -> float:
    """``ln(1 + sinh(x/2)**2) = 2 ln cosh(x/2)`` without overflow."""
    x = abs(float(x))
    if x < 2.0:
        return math.log1p(math.sinh(0.5 * x) ** 2)
    return x - 2.0 * math.log(2.0) + 2.0 * math.log1p(math.exp(-x))


def eval_2f1_sinh(params: HypergeomParams, x: float, strategy: Optional[str] = None) -> EvalReport:
    """Evaluate at ``z = -sinh(x/2)**2`` for any real ``x``."""
    x = abs(float(x))
    z = -math.sinh(0.5 * x) ** 2 if x < 4.0 else None
    return eval_2f1_log(params, log1mz_from_geodesic(x), strategy=strategy, z=z)


def eval_2f1_log_grid(params: HypergeomParams, t: np.ndarray):
    """Vectorised evaluation over logarithmic arguments.

    Returns ``(mantissa, log_scale)`` arrays with
    ``value = mantissa * exp(log_scale)``. All points that need ODE
    continuation share a single integration.
    """
    t = np.asarray(t, dtype=float)
    mant = np.empty_like(t)
    logs = np.zeros_like(t)
    ode_idx = []
    for i, ti in enumerate(t.flat):
        strat = _choose_strategy(ti) if ti > 0 else "series"
        if strat == "ode_continuation":
            ode_idx.append(i)
            continue
        rep = eval_2f1_log(params, float(ti))
        mant.flat[i] = rep.scaled_value
        logs.flat[i] = rep.log_scale
    if ode_idx:
        idx = np.array(ode_idx)
        tt = t.flat[idx]
        vals, _, _ = _ode_values(params, tt)
        mant.flat[idx] = vals
        logs.flat[idx] = -params.decay_rate * tt
    return mant, logs


def eval_2f1_derivative(params: HypergeomParams, z: float, strategy: Optional[str] = None) -> float:
    """Derivative ``(ab/c) 2F1(a+1, b+1; c+1; z)``."""
    rep = eval_2f1(params.shifted(), z, strategy=strategy)
    return params.ab / params.c * rep.value


# ---------------------------------------------------------------------------
# continued fraction


def ratio_cf(n: int, kappa: float, lam: float, rho: float, *, max_terms: int = 100_000) -> float:
    """Quotient ``R_n(rho) / (R_{n+2}(rho) sinh(kappa rho))`` by continued fraction.

    ``R_theta`` is the radial profile ``2F1((theta-1)/2 +/- i alpha; theta/2;
    -sinh(kappa rho / 2)**2)`` with ``lam = (n-1)**2 kappa**2 / 4 + kappa**2 alpha**2``.
    With ``t = coth(kappa rho)`` the fraction

        T(t) = x_0 t - y_1 / (x_1 t - y_2 / (x_2 t - ...)),
        x_l = (n + 2 l) / 2,   y_l = (l**2 + l (n-1) + lam / kappa**2) / 4,

    satisfies ``T(t) = x_0 * quotient``. It is evaluated by the modified
    Lentz algorithm and divided by ``x_0 = n/2``.

    Convergence slows as ``t -> 1``: the partial quotients approach the
    parabolic boundary ``-1/4`` and the number of terms grows roughly like
    ``exp(kappa rho)``. Beyond ``kappa rho`` of about 10 the term cap is
    reached and :class:`NumericalError` is raised.
    """
    if int(n) != n or n < 2:
        raise ParameterError("n must be an integer >= 2")
    if not (kappa > 0 and rho > 0):
        raise ParameterError("kappa and rho must be positive")
    if not lam > (n - 1) ** 2 * kappa**2 / 4.0:
        raise ParameterError("lambda must exceed (n-1)^2 kappa^2 / 4")
    t = 1.0 / math.tanh(kappa * rho)
    mu = lam / kappa**2
    x0 = 0.5 * n
    f = x0 * t
    big_c = f
    big_d = 0.0
    for ell in range(1, max_terms + 1):
        a_l = -(ell * ell + ell * (n - 1) + mu) / 4.0
        b_l = (n + 2.0 * ell) / 2.0 * t
        big_d = b_l + a_l * big_d
        big_c = b_l + a_l / big_c
        if big_d == 0.0 or big_c == 0.0:
            raise NumericalError("continued fraction breakdown (zero denominator)", partial=f)
        big_d = 1.0 / big_d
        delta = big_c * big_d
        f *= delta
        if abs(delta - 1.0) <= 1e-16:
            return f / x0
    raise NumericalError(
        f"continued fraction did not converge in {max_terms} terms (coth(kappa rho) - 1 = {t - 1.0:.3g})",
        partial=f / x0,
    )
