import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypeig.errors import DivergenceError, ParameterError
from hypeig.funk import (
    FLAG_CURVATURE,
    FUNK_TARGET,
    KLEIN_TOL,
    beta,
    funk_boundary_value,
    funk_cometric,
    funk_distance,
    funk_distance_gradient,
    funk_frequency_report,
    funk_fundamental_frequency,
    funk_lambda_rho,
    funk_metric,
    funk_rayleigh,
    funk_rayleigh_quadrature,
    klein_cometric,
    klein_distance,
    klein_frequency_report,
    klein_metric,
    klein_rayleigh,
    klein_rayleigh_quadrature,
    laplace_shooting_check,
    polar_sup,
    reversed_gradient_diverges,
    reversed_gradient_shells,
    ric_weighted,
)
from hypeig.hyperball import omega

# mpmath at 50 digits
LAMBDA_RHO = {
    (2, 0.99): 0.022027441234769599752,
    (3, 0.999): 0.0030570993451753709994,
    (5, 0.99): 0.057510001564418831197,
    (2, 0.9999): 0.00020044441098479676798,
}
KLEIN_INTEGRALS = {  # (n, gamma): (denominator, numerator)
    (2, 0.51): (155.5243887915737832, 40.451893524688340678),
    (3, 1.001): (1568.4428782562463791, 1571.5813324556366536),
    (5, 2.2): (2.7816119907471327758, 13.46300203521612471),
    (3, 1.5): (1.6755160819145563938, 3.7699111843077518862),
}


def _interior(dim):
    def build(v, t):
        v = np.asarray(v)
        nv = np.linalg.norm(v)
        return v / nv * t if nv > 1e-6 else np.zeros(dim)

    return st.builds(build, st.lists(st.floats(-1, 1), min_size=dim, max_size=dim), st.floats(0.0, 0.99))


vectors = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


# ---------------------------------------------------------------------------
# metric


def test_metric_at_origin():
    y = np.array([0.3, -1.2, 2.0])
    assert funk_metric(np.zeros(3), y) == pytest.approx(np.linalg.norm(y), rel=1e-15)
    assert funk_cometric(np.zeros(3), y) == pytest.approx(np.linalg.norm(y), rel=1e-15)


@pytest.mark.parametrize("t", [0.1, 0.5, 0.9, 0.999])
def test_metric_along_position(t):
    x = np.array([t, 0.0])
    assert funk_metric(x, x) == pytest.approx(t / (1 - t), rel=1e-12)


# squares of factors below ~1e-150 underflow, which says nothing about the metric
@given(_interior(3), vectors, st.just(0.0) | st.floats(1e-100, 50))
def test_homogeneity(x, y, s):
    assert funk_metric(x, s * y) == pytest.approx(s * funk_metric(x, y), rel=1e-12, abs=1e-300)


def test_non_reversible():
    x = np.array([0.4, 0.1])
    y = np.array([1.0, 0.3])
    assert funk_metric(x, -y) != pytest.approx(funk_metric(x, y), rel=1e-3)
    assert klein_metric(x, -y) == pytest.approx(klein_metric(x, y), rel=1e-14)


def test_klein_is_symmetrised_funk():
    x = np.array([0.2, -0.5, 0.3])
    y = np.array([1.0, 2.0, -0.5])
    assert klein_metric(x, y) == pytest.approx(0.5 * (funk_metric(x, y) + funk_metric(x, -y)), rel=1e-13)


def test_cometric_formula():
    x = np.array([0.3, -0.4])
    xi = np.array([2.0, 1.0])
    assert funk_cometric(x, xi) == pytest.approx(math.sqrt(5) - 0.2, rel=1e-15)


@pytest.mark.parametrize("seed", range(20))
def test_polar_duality(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    v = rng.normal(size=n)
    x = v / np.linalg.norm(v) * rng.uniform(0, 0.9)
    xi = rng.normal(size=n)
    assert abs(funk_cometric(x, xi) - polar_sup(x, xi)) <= 1e-6 * max(1.0, funk_cometric(x, xi))


def test_eikonal_identity():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        v = rng.normal(size=n)
        x = v / np.linalg.norm(v) * rng.uniform(1e-3, 0.999)
        assert abs(funk_cometric(x, funk_distance_gradient(x)) - 1.0) <= 1e-10


def test_klein_cometric_dual_norm():
    # the Klein co-metric is the dual norm of a Riemannian metric: sup xi(v)/F_K(x, v)
    x = np.array([0.5, 0.2])
    xi = np.array([1.0, -2.0])
    ang = np.linspace(0, 2 * np.pi, 200001)
    vs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sup = max(float(xi @ v) / klein_metric(x, v) for v in vs[::50])
    assert klein_cometric(x, xi) == pytest.approx(sup, rel=1e-5)


def test_gradient_rejects_origin():
    with pytest.raises(ParameterError):
        funk_distance_gradient(np.zeros(2))


@pytest.mark.parametrize("bad", [[1.0, 0.0], [0.8, 0.8], [[0.1, 0.2]]])
def test_point_validation(bad):
    with pytest.raises(ParameterError):
        funk_metric(bad, [1.0, 0.0])


# ---------------------------------------------------------------------------
# distances


def test_distance_examples():
    x = np.array([1 - math.exp(-1), 0.0, 0.0])
    assert funk_distance(np.zeros(3), x) == pytest.approx(1.0, rel=1e-14)
    y = np.array([0.3, 0.4])
    assert funk_distance(y, np.zeros(2)) == pytest.approx(math.log(1.5), rel=1e-14)
    assert funk_distance(np.zeros(2), y) == pytest.approx(-math.log(0.5), rel=1e-14)
    assert funk_distance(y, y) == 0.0


@given(st.floats(0.01, 0.99))
def test_asymmetry(t):
    x = np.array([t, 0.0])
    assert funk_distance(np.zeros(2), x) > funk_distance(x, np.zeros(2))


@given(_interior(2), _interior(2), _interior(2))
def test_triangle_inequality(a, b, c):
    assert funk_distance(a, c) <= funk_distance(a, b) + funk_distance(b, c) + 1e-12
    assert funk_distance(a, b) >= 0


def test_klein_distance_is_hyperbolic():
    t = 0.6
    assert klein_distance(np.zeros(2), np.array([t, 0.0])) == pytest.approx(math.atanh(t), rel=1e-14)


def test_metric_is_derivative_of_distance():
    x = np.array([0.3, -0.2])
    y = np.array([0.5, 0.7])
    h = 1e-6
    fd = funk_distance(x, x + h * y) / h
    assert fd == pytest.approx(funk_metric(x, y), rel=1e-5)


# ---------------------------------------------------------------------------
# Rayleigh quotients


def test_beta():
    assert beta(2.0, 3.0) == pytest.approx(1 / 12, rel=1e-14)


@pytest.mark.parametrize("n,alpha,q", [(2, 0.5, 0.25), (3, 1e-3, 1e-6)])
def test_funk_rayleigh_examples(n, alpha, q):
    s = funk_rayleigh(n, alpha)
    assert s.quotient == pytest.approx(q, rel=1e-14)
    assert s.denominator == pytest.approx(n * omega(n) * beta(2 * alpha + 1, n), rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("alpha", [1e-3, 0.3, 1.0, 4.0])
def test_funk_rayleigh_quadrature(n, alpha):
    a, b = funk_rayleigh(n, alpha), funk_rayleigh_quadrature(n, alpha)
    assert b.numerator == pytest.approx(a.numerator, rel=1e-8)
    assert b.denominator == pytest.approx(a.denominator, rel=1e-8)


@pytest.mark.parametrize("alpha,diverges", [(0.1, True), (0.3, True), (0.5, True), (0.5001, False), (0.7, False), (2.0, False)])
def test_reversed_gradient(alpha, diverges):
    assert reversed_gradient_diverges(3, alpha) is diverges


def test_reversed_gradient_shells_grow():
    shells = reversed_gradient_shells(2, 0.25)
    assert shells[-1] > 1e5 * shells[0]
    assert all(b > a for a, b in zip(shells[5:], shells[6:]))


@pytest.mark.parametrize("key", sorted(KLEIN_INTEGRALS))
def test_klein_integrals_oracle(key):
    den, num = KLEIN_INTEGRALS[key]
    s = klein_rayleigh(*key)
    assert s.denominator == pytest.approx(den, rel=1e-9)
    assert s.numerator == pytest.approx(num, rel=1e-9)
    assert s.quotient == pytest.approx(key[1] ** 2, rel=1e-14)


@pytest.mark.parametrize("key", sorted(KLEIN_INTEGRALS))
def test_klein_quadrature(key):
    assert klein_rayleigh_quadrature(*key).quotient == pytest.approx(key[1] ** 2, rel=1e-8)


@pytest.mark.parametrize("n,gamma", [(3, 0.9), (3, 1.0), (2, 0.5), (5, 1.5)])
def test_klein_divergence(n, gamma):
    with pytest.raises(DivergenceError):
        klein_rayleigh(n, gamma)


def test_rayleigh_validation():
    with pytest.raises(ParameterError):
        funk_rayleigh(3, 0.0)
    with pytest.raises(ParameterError):
        funk_rayleigh(1, 0.5)


# ---------------------------------------------------------------------------
# Laplace eigenvalue on Euclidean balls


@pytest.mark.parametrize("key", sorted(LAMBDA_RHO))
def test_lambda_rho_oracle(key):
    assert funk_lambda_rho(*key) == pytest.approx(LAMBDA_RHO[key], rel=1e-10)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_lambda_rho_decreasing(n):
    vals = [funk_lambda_rho(n, rho) for rho in (0.99, 0.999, 0.9999, 0.99999)]
    assert all(v is not None for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


@pytest.mark.parametrize("n,rho", [(2, 0.95), (3, 0.99), (4, 0.99)])
def test_lambda_rho_shooting(n, rho):
    lam = funk_lambda_rho(n, rho)
    assert laplace_shooting_check(n, lam, rho) == pytest.approx(rho, abs=1e-6)


@pytest.mark.parametrize("n,rho", [(3, 0.2), (2, 0.9), (4, 0.95)])
def test_lambda_rho_absent_for_small_rho(n, rho):
    assert funk_lambda_rho(n, rho) is None


def test_boundary_value_limits():
    # lam -> 0 gives 2F1(n-1, -1; n-1; rho) = 1 - rho
    val, err = funk_boundary_value(3, 1e-12, 0.7)
    assert val == pytest.approx(0.3, abs=1e-9)
    assert err < 1e-12
    with pytest.raises(ParameterError):
        funk_boundary_value(3, 0.3, 0.5)
    with pytest.raises(ParameterError):
        funk_lambda_rho(3, 1.0)


# ---------------------------------------------------------------------------
# drivers and recorded constants


def test_recorded_curvatures():
    assert FLAG_CURVATURE == -0.25
    assert ric_weighted(3, math.inf) == -0.5
    assert ric_weighted(3, 3) == -math.inf
    assert ric_weighted(3, 5) == pytest.approx(-0.5 - 16 / 8)
    with pytest.raises(ParameterError):
        ric_weighted(3, 2)


def test_funk_fast_routes():
    rep = funk_frequency_report(3, routes=("rayleigh", "laplace"))
    assert rep.ok and rep.bound <= FUNK_TARGET
    assert rep.routes["rayleigh"] == pytest.approx(1e-6)
    d = rep.to_dict()
    assert d["route_rayleigh"] == rep.routes["rayleigh"] and d["model"] == "funk"
    with pytest.raises(ParameterError):
        funk_frequency_report(3, routes=("bogus",))


@pytest.mark.slow
def test_funk_all_routes_n2():
    rep = funk_frequency_report(2)
    assert rep.ok
    assert set(rep.routes) == {"comparison", "rayleigh", "laplace"}
    assert all(v <= FUNK_TARGET for v in rep.routes.values())
    assert funk_fundamental_frequency(2) <= FUNK_TARGET


@pytest.mark.parametrize("n", [2, 3, 5])
def test_klein_contrast(n):
    rep = klein_frequency_report(n)
    assert rep.ok
    assert abs(rep.bound - (n - 1) ** 2 / 4) <= KLEIN_TOL
