"""Invariant suites run by ``hypeig --command selftest``.

Each suite draws its random instances from a seeded generator, so a run
is reproducible. A check that raises counts as a failure, and the
exception text is kept in the failure list.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import bounds, recurrence_constants, harmonic_constant, Parity
from .funk import (
    funk_cometric,
    funk_distance,
    funk_distance_gradient,
    funk_rayleigh,
    funk_rayleigh_quadrature,
    klein_rayleigh,
    klein_rayleigh_quadrature,
    polar_sup,
)
from .hyperball import BallSpec, S, eigen
from .hypergeom import HypergeomParams, eval_2f1, eval_2f1_derivative, ratio_cf
from .mm_comparison import funk_measure, identity_residual, layer_cake, transplant_functions
from .radial_sturm import is_oscillatory

__all__ = ["SuiteResult", "SUITES", "run_suite", "run_all"]

Check = Tuple[str, bool, str]


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    seconds: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "first_failure": self.failures[0] if self.failures else "",
        }


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# suites (generators of (label, ok, detail))


def _hypergeom_suite(rng: np.random.Generator) -> Iterator[Check]:
    # 2F1(1 +/- i g; 3/2; -sinh^2(x/2)) = sin(g x) / (g sinh x)
    for g, x in rng.uniform(0.0, 5.0, size=(20, 2)):
        g, x = max(g, 1e-3), max(x, 1e-3)
        val = eval_2f1(HypergeomParams.conjugate(1.0, g, 1.5), -math.sinh(0.5 * x) ** 2).value
        ref = math.sin(g * x) / (g * math.sinh(x))
        yield f"trig identity g={g:.4g} x={x:.4g}", abs(val - ref) <= 1e-9, f"|diff|={abs(val - ref):.3g}"

    # 2F1(k +/- i g; k + 1/2; -sinh^2(x/2)) against the S_k closed forms
    for k in (1, 2, 3):
        for g, x in rng.uniform(0.2, 4.0, size=(5, 2)):
            val = eval_2f1(HypergeomParams.conjugate(float(k), g, k + 0.5), -math.sinh(0.5 * x) ** 2).value
            dfact = math.prod(range(2 * k - 1, 0, -2))
            pref = (-1) ** (k - 1) * dfact / math.prod(j * j + g * g for j in range(1, k))
            ref = pref * S(k, g, x)
            yield f"S_{k} identity g={g:.4g} x={x:.4g}", _rel(val, ref) <= 1e-8 or abs(val - ref) <= 1e-14, \
                f"rel={_rel(val, ref):.3g}"

    # Pfaff transform with both sides forced onto the series
    for _ in range(20):
        a, b = rng.uniform(-2.5, 2.5, size=2)
        c = rng.uniform(0.3, 4.0)
        z = -rng.uniform(0.05, 0.9)
        p = HypergeomParams.real(a, b, c)
        lhs = eval_2f1(p, z, strategy="series").value
        w = z / (z - 1.0)
        rhs = (1.0 - z) ** (-a) * eval_2f1(HypergeomParams.real(a, c - b, c), w, strategy="series").value
        scale = max(abs(lhs), 1e-3)
        yield f"pfaff a={a:.3g} b={b:.3g} c={c:.3g} z={z:.3g}", abs(lhs - rhs) <= 1e-10 * scale, \
            f"diff={abs(lhs - rhs):.3g}"

    # derivative formula against central differences
    for _ in range(50):
        if rng.random() < 0.5:
            p = HypergeomParams.conjugate(rng.uniform(0.5, 3.0), rng.uniform(0.1, 3.0), rng.uniform(1.0, 3.0))
        else:
            p = HypergeomParams.real(rng.uniform(-1.5, 2.0), rng.uniform(-1.5, 2.0), rng.uniform(0.5, 3.0))
        z = -rng.uniform(0.0, 10.0)
        h = 1e-5 * max(1.0, abs(z))
        fd = (eval_2f1(p, z + h).value - eval_2f1(p, z - h).value) / (2.0 * h)
        d = eval_2f1_derivative(p, z)
        scale = max(abs(d), 1e-2 * max(abs(eval_2f1(p, z).value), 1e-300) / max(1.0, abs(z)))
        yield f"derivative {p} z={z:.3g}", abs(d - fd) <= 1e-6 * scale, f"d={d:.6g} fd={fd:.6g}"


def _sturm_suite(rng: np.random.Generator) -> Iterator[Check]:
    for _ in range(100):
        n = int(rng.integers(2, 8))
        thr = (n - 1) ** 2
        side = 1.0 if rng.random() < 0.5 else -1.0
        C = thr + side * rng.uniform(0.5, 3.0)
        if C <= 0:
            C = thr + rng.uniform(0.5, 3.0)
        verdict, zeros = is_oscillatory(n, C, diagnostic=True)
        good = (zeros >= 2) if verdict else (zeros == 0)
        yield f"oscillation n={n} C={C:.4g}", good and verdict == (C > thr), f"verdict={verdict} zeros={zeros}"


def _eigen_suite(rng: np.random.Generator) -> Iterator[Check]:
    for kappa in (0.5, 1.0, 2.0):
        for r in (0.25, 1.0, math.pi, 10.0):
            spec = BallSpec(3, kappa, r)
            ref = kappa * kappa + math.pi**2 / (r * r)
            for m in ("hypergeom_root", "s_recursion", "ode_shooting"):
                lam = eigen(spec, m).lam
                yield f"n=3 law {m} k={kappa} r={r:.4g}", _rel(lam, ref) <= 1e-9, f"rel={_rel(lam, ref):.3g}"
    for n in range(2, 8):
        prev = math.inf
        for r in (0.5, 1.0, 2.0, 5.0, 10.0):
            spec = BallSpec(n, 1.0, r)
            lam = eigen(spec).lam
            yield f"monotone in r n={n} r={r}", spec.mckean < lam < prev, f"lam={lam:.12g}"
            prev = lam
            bs = bounds(spec)
            inside = bs.bf_lower * (1 - 1e-10) <= lam <= bs.bf_upper * (1 + 1e-10)
            inside = inside and bs.savo_lower <= lam <= bs.savo_upper
            yield f"bounds n={n} r={r}", inside, f"lam={lam:.12g} {bs.to_dict()}"


def _asymptotics_suite(rng: np.random.Generator) -> Iterator[Check]:
    for l in range(2, 12):  # noqa: E741
        c = recurrence_constants(Parity.ODD, l).c_l
        ref = math.pi * harmonic_constant(Parity.ODD, l)
        yield f"odd c_{l}", _rel(c, ref) <= 1e-12, f"rel={_rel(c, ref):.3g}"
    for l in range(1, 12):  # noqa: E741
        c = recurrence_constants(Parity.EVEN, l).c_l
        ref = math.pi * harmonic_constant(Parity.EVEN, l)
        yield f"even c_{l}", abs(c - ref) <= 1e-12 * max(abs(ref), 1.0), f"diff={abs(c - ref):.3g}"


def _comparison_suite(rng: np.random.Generator) -> Iterator[Check]:
    for n in (2, 3, 5):
        for kappa in (0.5, 1.0, 2.0):
            for r in (0.5, 1.0, 3.0):
                spec = BallSpec(n, kappa, r)
                tf = transplant_functions(spec)
                res = identity_residual(spec, tf)
                yield f"integral identity n={n} k={kappa} r={r}", res <= 1e-8, f"res={res:.3g}"
                grid = np.linspace(0.0, r, 1001)[:-1]
                rn = tf.R_n(grid)
                yield f"R_n decreasing n={n} k={kappa} r={r}", bool(np.all(np.diff(rn) < 0)), ""
                pts = np.linspace(r / 50, r, 50)
                q = tf.R_n(pts) / (tf.R_n2(pts) * np.sinh(kappa * pts))
                yield f"ratio decreasing n={n} k={kappa} r={r}", bool(np.all(np.diff(q) < 0)), ""
                worst = 0.0
                for rho, qv in zip(pts[:-1:7], q[:-1:7]):
                    cf = ratio_cf(n, kappa, tf.lam, float(rho))
                    worst = max(worst, _rel(cf, qv))
                yield f"ratio_cf n={n} k={kappa} r={r}", worst <= 1e-8, f"rel={worst:.3g}"


def _funk_suite(rng: np.random.Generator) -> Iterator[Check]:
    for _ in range(100):
        n = int(rng.integers(2, 6))
        v = rng.normal(size=n)
        x = v / np.linalg.norm(v) * rng.uniform(0.01, 0.99)
        val = funk_cometric(x, funk_distance_gradient(x))
        yield f"eikonal n={n}", abs(val - 1.0) <= 1e-10, f"F*={val!r}"
    for _ in range(20):
        n = int(rng.integers(2, 4))
        v = rng.normal(size=n)
        x = v / np.linalg.norm(v) * rng.uniform(0.0, 0.9)
        xi = rng.normal(size=n)
        a, b = funk_cometric(x, xi), polar_sup(x, xi)
        yield f"polar duality n={n}", abs(a - b) <= 1e-6 * max(1.0, a), f"{a!r} vs {b!r}"
    for n in (2, 3, 5):
        for rho in (0.1, 1.0, 5.0):
            mu = layer_cake(funk_measure(n), lambda s: 1.0, rho)
            ref = funk_measure(n).ball_volume(rho)
            yield f"funk volume n={n} rho={rho}", _rel(mu, ref) <= 1e-10, f"rel={_rel(mu, ref):.3g}"
        for alpha in (1e-3, 0.5, 2.0):
            a, b = funk_rayleigh(n, alpha), funk_rayleigh_quadrature(n, alpha)
            yield f"funk rayleigh n={n} a={alpha}", _rel(b.quotient, a.quotient) <= 1e-8, ""
        for d in (0.01, 0.5, 2.0):
            g = 0.5 * (n - 1) + d
            a, b = klein_rayleigh(n, g), klein_rayleigh_quadrature(n, g)
            yield f"klein rayleigh n={n} g={g}", _rel(b.quotient, a.quotient) <= 1e-8, ""
    x = np.array([0.3, -0.2, 0.5])
    yield "funk asymmetry", funk_distance(np.zeros(3), x) != funk_distance(x, np.zeros(3)), ""


SUITES: Dict[str, Callable[[np.random.Generator], Iterator[Check]]] = {
    "hypergeom": _hypergeom_suite,
    "radial_sturm": _sturm_suite,
    "hyperball": _eigen_suite,
    "asymptotics": _asymptotics_suite,
    "comparison": _comparison_suite,
    "funk": _funk_suite,
}


def run_suite(name: str, seed: int = 20240611) -> SuiteResult:
    """Run one suite. Unknown names raise ``KeyError``."""
    gen = SUITES[name]
    out = SuiteResult(name)
    t0 = time.perf_counter()
    it = gen(np.random.default_rng(seed))
    while True:
        try:
            label, ok, detail = next(it)
        except StopIteration:
            break
        except Exception as exc:  # a crashing check ends the suite and counts once
            out.failed += 1
            out.failures.append(f"exception: {type(exc).__name__}: {exc}")
            break
        if ok:
            out.passed += 1
        else:
            out.failed += 1
            out.failures.append(f"{label}: {detail}")
    out.seconds = time.perf_counter() - t0
    return out


def run_all(names: Optional[Sequence[str]] = None, seed: int = 20240611) -> List[SuiteResult]:
    return [run_suite(name, seed) for name in (names or list(SUITES))]
