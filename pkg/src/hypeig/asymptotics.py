"""Expansions and classical bounds for the first eigenvalue of hyperbolic balls.

Everything here is written for curvature ``-kappa**2``. The rescaling
``lambda(n, kappa, r) = kappa**2 lambda(n, 1, kappa r)`` is applied wherever
a formula is naturally stated for ``kappa = 1``.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from typing import List, Optional, Sequence

from scipy.integrate import quad

from .bessel import bessel_first_zero
from .errors import NumericalError, ParameterError
from .hyperball import BallSpec, eigen

__all__ = [
    "bessel_first_zero",
    "Parity",
    "BoundSet",
    "ExpansionCoeffs",
    "harmonic_constant",
    "large_r_expansion",
    "small_r_expansion",
    "savo_integral",
    "savo_constant",
    "bounds",
    "recurrence_constants",
    "alpha_of_r",
    "correction_sequence",
    "fit_expansion_constant",
]


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class BoundSet:
    """Lower and upper estimates for the eigenvalue of one ball.

    ``cheng_upper`` is the bottom of the spectrum of the whole space, which
    the ball eigenvalue approaches from above as ``r`` grows. The two
    two-sided estimates for small radii (``bf_*``) are only known for
    ``kappa = 1`` and are ``None`` otherwise.
    """

    mckean_lower: float
    cheng_upper: float
    bf_lower: Optional[float]
    bf_upper: Optional[float]
    savo_lower: float
    savo_upper: float

    def to_dict(self) -> dict:
        return {
            "mckean_lower": self.mckean_lower,
            "cheng_upper": self.cheng_upper,
            "bf_lower": self.bf_lower,
            "bf_upper": self.bf_upper,
            "savo_lower": self.savo_lower,
            "savo_upper": self.savo_upper,
        }


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Constant ``c_l`` in ``alpha = pi/r + c_l/r**2 + O(r**-3)`` (``kappa = 1``).

    Attributes
    ----------
    parity : Parity
        ``odd`` for ``n = 2l+1``, ``even`` for ``n = 2l``.
    l : int
    c_l : float
        Value obtained from the recurrences.
    harmonic_sum : float
        ``c_l / pi``, i.e. the bracketed harmonic-type sum, evaluated in
        closed form.
    """

    parity: Parity
    l: int  # noqa: E741
    c_l: float
    harmonic_sum: float


def _split_dimension(n: int):
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ParameterError("n must be an integer >= 2")
    n = int(n)
    return (Parity.ODD, (n - 1) // 2) if n % 2 else (Parity.EVEN, n // 2)


def harmonic_constant(parity, l: int) -> float:  # noqa: E741
    """Closed form of ``c_l / pi``.

    Odd: ``1 + 1/2 + ... + 1/(l-1)``.
    Even: ``2 (1 + 1/3 + ... + 1/(2l-3) - ln 2)``, which is ``-2 ln 2`` for ``l = 1``.
    """
    parity = Parity(parity)
    if parity is Parity.ODD:
        if l < 1:
            raise ParameterError("odd parity needs l >= 1")
        return math.fsum(1.0 / k for k in range(1, l))
    if l < 1:
        raise ParameterError("even parity needs l >= 1")
    return 2.0 * (math.fsum(1.0 / (2 * k - 1) for k in range(1, l)) - math.log(2.0))


def large_r_expansion(n: int, kappa: float, r: float) -> float:
    """Two-term large-radius expansion of the eigenvalue.

    ``(n-1)**2 kappa**2/4 + (pi/r)**2 (1 + c_l/(pi kappa r))**2``. For
    ``n = 3`` the sum is empty and the expression is the exact eigenvalue.
    """
    parity, ell = _split_dimension(n)
    spec = BallSpec(n, kappa, r)
    h = harmonic_constant(parity, ell)
    return spec.mckean + (math.pi / spec.r) ** 2 * (1.0 + h / (spec.kappa * spec.r)) ** 2


def small_r_expansion(n: int, kappa: float, r: float) -> float:
    """``j_{n/2-1,1}**2 / r**2 + n (n-1) kappa**2 / 6``."""
    spec = BallSpec(n, kappa, r)
    j = bessel_first_zero(0.5 * spec.n - 1.0)
    return (j / spec.r) ** 2 + spec.n * (spec.n - 1) * spec.kappa**2 / 6.0


_savo_lock = threading.Lock()
_savo_cache: List[float] = []


def _savo_integrand(s: float) -> float:
    if s < 1e-4:
        return 1.0 - s * s / 3.0
    return (s / math.sinh(s)) ** 2


def savo_integral() -> float:
    """``int_0^inf s**2 / sinh(s)**2 ds``, computed once and cached.

    The range is cut at ``s = 60``. The tail beyond it is below
    ``4 * 61**2 * exp(-120)``, far under double precision.
    """
    if not _savo_cache:
        with _savo_lock:
            if not _savo_cache:
                val, _ = quad(_savo_integrand, 0.0, 60.0, epsabs=0.0, epsrel=1e-13, limit=200)
                _savo_cache.append(val)
    return _savo_cache[0]


def savo_constant(n: int) -> float:
    """``C = pi**2 (n**2 - 1)/2 * int_0^inf s**2/sinh(s)**2 ds``."""
    return math.pi**2 * (n * n - 1) / 2.0 * savo_integral()


def bounds(spec: BallSpec) -> BoundSet:
    """All available estimates for ``spec``.

    The cubic corrections of the large-radius bounds are given for unit
    curvature. They carry a factor ``1/kappa`` here, which is what the
    rescaling ``r -> kappa r`` produces.
    """
    n, kappa, r = spec.n, spec.kappa, spec.r
    mck = spec.mckean
    base = mck + (math.pi / r) ** 2
    savo_lower = base - 4.0 * math.pi**2 / ((n - 1) * kappa * r**3)
    savo_upper = base + savo_constant(n) / (kappa * r**3)
    bf_lower = bf_upper = None
    if kappa == 1.0:
        j2 = bessel_first_zero(0.5 * n - 1.0) ** 2 / r**2
        # 1/r^2 - 1/sinh(r)^2 loses digits for small r; use the series there
        if r < 1e-2:
            gap = 1.0 / 3.0 - r * r / 15.0
        else:
            gap = 1.0 / r**2 - 1.0 / math.sinh(r) ** 2 if r < 350 else 1.0 / r**2
        if n == 2:
            bf_lower = j2 + 0.25 * (gap + 1.0)
            bf_upper = j2 + 1.0 / 3.0
        else:
            bf_lower = j2 + n * (n - 1) / 6.0
            bf_upper = j2 + mck - (n - 1) * (n - 3) / 4.0 * gap
    return BoundSet(mck, mck, bf_lower, bf_upper, savo_lower, savo_upper)


# ---------------------------------------------------------------------------
# recurrence route to c_l


def _even_seed_values():
    """``q_1(0) = int_0^inf dy/sqrt(e^y-1)`` and ``p_1'(0) = int_0^inf y dy/sqrt(e^y-1)``.

    With ``s = sqrt(e^y - 1)`` both become smooth integrals over ``s`` in
    ``(0, inf)``: ``2/(1+s^2)`` and ``2 ln(1+s^2)/(1+s^2)``.
    """
    q1, _ = quad(lambda s: 2.0 / (1.0 + s * s), 0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    dp1, _ = quad(
        lambda s: 2.0 * math.log1p(s * s) / (1.0 + s * s), 0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200
    )
    return q1, dp1


def recurrence_constants(parity, l: int) -> ExpansionCoeffs:  # noqa: E741
    """``c_l`` from the trigonometric-coefficient recurrences, cross-checked against the closed form.

    Odd parity propagates ``Q_{k+1}(0) = -k Q_k(0)`` and
    ``P'_{k+1}(0) = Q_k(0) - k P'_k(0)`` from ``P_1 = 0, Q_1 = 1`` and
    returns ``c_l = -pi P'_l(0)/Q_l(0)``. Even parity propagates
    ``q_{k+1}(0) = (1/2 - k) q_k(0)`` and
    ``p'_{k+1}(0) = q_k(0) + (1/2 - k) p'_k(0)`` from the integrals
    ``q_1(0) = pi`` and ``p'_1(0) = 2 pi ln 2`` (both evaluated by
    quadrature), then returns ``c_l = -pi p'_l(0)/q_l(0)``.

    Raises
    ------
    ParameterError
        ``l < 2`` for odd parity or ``l < 1`` for even parity.
    NumericalError
        The two routes differ by more than 1e-12 relative.
    """
    parity = Parity(parity)
    if isinstance(l, bool) or int(l) != l:
        raise ParameterError("l must be an integer")
    l = int(l)  # noqa: E741
    if parity is Parity.ODD:
        if l < 2:
            raise ParameterError("odd parity needs l >= 2")
        q, dp = 1.0, 0.0
        for k in range(1, l):
            q, dp = -k * q, q - k * dp
    else:
        if l < 1:
            raise ParameterError("even parity needs l >= 1")
        q, dp = _even_seed_values()
        for k in range(1, l):
            q, dp = (0.5 - k) * q, q + (0.5 - k) * dp
    c = -math.pi * dp / q
    closed = harmonic_constant(parity, l)
    if abs(c - math.pi * closed) > 1e-12 * max(abs(c), 1.0):
        raise NumericalError(
            f"recurrence value {c!r} disagrees with closed form {math.pi * closed!r}", partial=(c, closed)
        )
    return ExpansionCoeffs(parity, l, c, closed)


# ---------------------------------------------------------------------------
# empirical extraction


def alpha_of_r(n: int, r: float, method: Optional[str] = None) -> float:
    """``alpha = sqrt(lambda - (n-1)**2/4)`` for the unit-curvature ball of radius ``r``."""
    return eigen(BallSpec(n, 1.0, r), method).alpha


def correction_sequence(n: int, r_grid: Sequence[float], exponent: float = 2.0, alphas=None) -> List[float]:
    """``r**exponent * (alpha(r) - pi/r)`` on ``r_grid``.

    With ``exponent = 2`` this tends to ``c_l``. A smaller exponent sends it
    to zero and a larger one makes it diverge, unless ``c_l = 0``.
    """
    if alphas is None:
        alphas = [alpha_of_r(n, r) for r in r_grid]
    return [r**exponent * a - math.pi * r ** (exponent - 1.0) for r, a in zip(r_grid, alphas)]


def _neville_at_zero(h: Sequence[float], y: Sequence[float]):
    """Polynomial extrapolation of ``y(h)`` to ``h = 0``. Returns the diagonal of the tableau."""
    m = len(h)
    table = list(y)
    diag = [table[0]]
    for k in range(1, m):
        for i in range(m - k):
            table[i] = (h[i + k] * table[i] - h[i] * table[i + 1]) / (h[i + k] - h[i])
        diag.append(table[0])
    return diag


def fit_expansion_constant(n: int, r_grid: Sequence[float], *, return_report: bool = False):
    """Estimate ``c_l`` from exact eigenvalues on ``r_grid``.

    ``y(r) = r**2 alpha(r) - pi r`` is a smooth function of ``h = 1/r``
    near zero (up to exponentially small terms). Its value at ``h = 0`` is
    found by Neville-Richardson extrapolation through all grid points.

    Parameters
    ----------
    n : int
    r_grid : sequence of float
        Increasing radii, at least four of them and all ``>= 20``.
    return_report : bool
        Also return a dict with the samples and the extrapolation diagonal.

    Raises
    ------
    ParameterError
        Grid violates the preconditions.
    NumericalError
        The last two extrapolants differ by more than 1% of
        ``max(|estimate|, 1)``. The report is attached as ``partial``.
    """
    _split_dimension(n)
    grid = [float(r) for r in r_grid]
    if len(grid) < 4:
        raise ParameterError("need at least four radii")
    if min(grid) < 20:
        raise ParameterError("radii must be >= 20")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("r_grid must be strictly increasing")
    alphas = [alpha_of_r(n, r) for r in grid]
    y = correction_sequence(n, grid, 2.0, alphas)
    h = [1.0 / r for r in grid]
    diag = _neville_at_zero(h, y)
    est = diag[-1]
    spread = abs(diag[-1] - diag[-2])
    report = {"r": grid, "alpha": alphas, "y": y, "diagonal": diag, "spread": spread}
    if not math.isfinite(est) or spread > 1e-2 * max(abs(est), 1.0):
        raise NumericalError(f"extrapolation is ill-conditioned (spread {spread:.3g})", partial=report)
    return (est, report) if return_report else est
