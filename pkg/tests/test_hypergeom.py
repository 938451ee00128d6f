import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypeig.errors import NumericalError, ParameterError
from hypeig.hyperball import S
from hypeig.hypergeom import (
    HypergeomParams,
    eval_2f1,
    eval_2f1_derivative,
    eval_2f1_log,
    eval_2f1_log_grid,
    eval_2f1_sinh,
    log1mz_from_geodesic,
    ratio_cf,
)

# (a_re, a_im or b, c, z) -> value; mpmath.hyp2f1 at 30 significant digits
MPMATH_VALUES = [
    (HypergeomParams.conjugate(1.0, 1.0, 1.5), -math.sinh(0.5) ** 2, 0.71602291536043387133),
    (HypergeomParams.conjugate(1.0, 2.0, 1.5), -0.25, 0.41947559217753034157),
    (HypergeomParams.conjugate(2.0, 0.7, 2.5), -3.0, 0.069610404974342912767),
    (HypergeomParams.conjugate(1.5, 1.3, 2.0), -50.0, 0.000099019697070328125793),
    (HypergeomParams.conjugate(3.0, 0.2, 3.5), -1e4, 4.4291366551625363698e-12),
    (HypergeomParams.conjugate(0.5, 4.0, 1.0), -1e6, -0.00026947619053243550582),
    (HypergeomParams.real(0.7, -0.3, 1.9), -0.6, 1.05963657948468857),
    (HypergeomParams.real(1.2, 2.5, 3.1), -12.0, 0.065394011896025237427),
    (HypergeomParams.real(-1.5, 0.25, 0.8), -0.99, 1.535625065038609734),
    (HypergeomParams.real(2.0, 1.0, 4.0), -200.0, 0.014350526785110094331),
]


@pytest.mark.parametrize("params,z,expected", MPMATH_VALUES)
def test_values_match_extended_precision(params, z, expected):
    rep = eval_2f1(params, z)
    assert rep.value == pytest.approx(expected, rel=1e-10, abs=1e-300)
    assert rep.est_error >= 0


def test_trig_closed_form_example():
    # right-hand side sin(1)/sinh(1), evaluated independently
    val = eval_2f1(HypergeomParams.conjugate(1.0, 1.0, 1.5), -math.sinh(0.5) ** 2).value
    assert val == pytest.approx(math.sin(1.0) / math.sinh(1.0), rel=1e-13)


def test_terminating_polynomial_at_one():
    for n in (2, 3, 5, 8):
        assert eval_2f1(HypergeomParams.real(n - 1, -1, n - 1), 1.0).value == pytest.approx(0.0, abs=1e-15)


def test_non_terminating_at_one_rejected():
    with pytest.raises(ParameterError):
        eval_2f1(HypergeomParams.real(0.5, 0.5, 2.0), 1.0)


@pytest.mark.parametrize("c", [0.0, -1.0, -4.0])
def test_invalid_c(c):
    with pytest.raises(ParameterError):
        HypergeomParams.real(1.0, 1.0, c)


def test_param_validation():
    with pytest.raises(ParameterError):
        HypergeomParams(1.0, 1.0, 1.5, b_re=2.0)
    with pytest.raises(ParameterError):
        HypergeomParams(1.0, 0.0, 1.5)
    with pytest.raises(ParameterError):
        HypergeomParams(1.0, -1.0, 1.5)
    with pytest.raises(ParameterError):
        eval_2f1(HypergeomParams.real(1, 1, 2), 2.0)
    with pytest.raises(ParameterError):
        eval_2f1(HypergeomParams.real(1, 1, 2), float("-inf"))


def test_series_cap_raises_with_partial():
    from hypeig import hypergeom

    with pytest.raises(NumericalError) as info:
        hypergeom._sum_series(0.5, 0.5, 1.0, 0.999999, cap=50)
    assert info.value.partial is not None


@given(
    st.floats(0.1, 5.0),
    st.floats(0.01, 5.0),
    st.floats(0.3, 5.0),
)
def test_value_at_zero_is_one(p, alpha, c):
    assert eval_2f1(HypergeomParams.conjugate(p, alpha, c), 0.0).value == 1.0
    assert eval_2f1(HypergeomParams.real(p, -alpha, c), 0.0).value == 1.0


def test_derivative_at_zero_is_ab_over_c():
    p = HypergeomParams.conjugate(1.5, 0.8, 2.5)
    assert eval_2f1_derivative(p, 0.0) == pytest.approx((1.5**2 + 0.8**2) / 2.5, rel=1e-15)


def test_derivative_examples():
    # d/dz [-ln(1-z)/z] at z = -1 equals 1/2 - ln 2 + ... ; mpmath value
    assert eval_2f1_derivative(HypergeomParams.real(1, 1, 2), -1.0) == pytest.approx(0.19314718055994530942, rel=1e-12)
    # central difference of mpmath hyp2f1 (mpmath.diff)
    assert eval_2f1_derivative(HypergeomParams.conjugate(1.0, 2.0, 1.5), -0.25) == pytest.approx(
        1.5614619931012928442, rel=1e-10
    )


@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_trig_identity(gamma, x):
    val = eval_2f1(HypergeomParams.conjugate(1.0, gamma, 1.5), -math.sinh(0.5 * x) ** 2).value
    assert abs(val - math.sin(gamma * x) / (gamma * math.sinh(x))) <= 1e-9


@given(st.sampled_from([1, 2, 3]), st.floats(0.1, 4.0), st.floats(0.05, 4.0))
def test_sk_identity(k, gamma, x):
    val = eval_2f1(HypergeomParams.conjugate(float(k), gamma, k + 0.5), -math.sinh(0.5 * x) ** 2).value
    dfact = math.prod(range(2 * k - 1, 0, -2))
    ref = (-1) ** (k - 1) * dfact / math.prod(j * j + gamma * gamma for j in range(1, k)) * S(k, gamma, x)
    assert val == pytest.approx(ref, rel=1e-8, abs=1e-13)


@given(
    st.floats(-2.5, 2.5),
    st.floats(-2.5, 2.5),
    st.floats(0.3, 4.0),
    st.floats(0.01, 0.95),
)
def test_pfaff_consistency_forced_series(a, b, c, mz):
    z = -mz
    lhs = eval_2f1(HypergeomParams.real(a, b, c), z, strategy="series").value
    w = z / (z - 1.0)
    rhs = (1.0 - z) ** (-a) * eval_2f1(HypergeomParams.real(a, c - b, c), w, strategy="series").value
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1e-3)


@pytest.mark.parametrize("z", [-0.5, -2.0, -10.0, -30.0])
def test_strategies_agree(z):
    p = HypergeomParams.conjugate(1.5, 1.2, 2.0)
    t = math.log1p(-z)
    vals = [eval_2f1_log(p, t, strategy=s).value for s in ("pfaff_series", "ode_continuation")]
    if z > -1:
        vals.append(eval_2f1(p, z, strategy="series").value)
    ref = float(mpmath.re(mpmath.hyp2f1(1.5 + 1.2j, 1.5 - 1.2j, 2.0, z)))
    for v in vals:
        assert v == pytest.approx(ref, rel=1e-9)


def test_forced_series_outside_disc_rejected():
    with pytest.raises(ParameterError):
        eval_2f1(HypergeomParams.conjugate(1.5, 1.2, 2.0), -3.0, strategy="series")


@given(
    st.one_of(
        st.tuples(st.just("c"), st.floats(0.5, 3.0), st.floats(0.1, 3.0), st.floats(1.0, 3.0)),
        st.tuples(st.just("r"), st.floats(-1.5, 2.0), st.floats(-1.5, 2.0), st.floats(0.5, 3.0)),
    ),
    st.floats(0.0, 10.0),
)
def test_derivative_matches_finite_difference(spec, mz):
    kind, x, y, c = spec
    p = HypergeomParams.conjugate(x, y, c) if kind == "c" else HypergeomParams.real(x, y, c)
    z = -mz
    h = 1e-5 * max(1.0, mz)
    fd = (eval_2f1(p, z + h).value - eval_2f1(p, z - h).value) / (2 * h)
    d = eval_2f1_derivative(p, z)
    f = eval_2f1(p, z).value
    # the second scale term covers derivatives that vanish at the sample point
    scale = max(abs(d), 1e-2 * abs(f) / max(1.0, mz))
    assert abs(d - fd) <= 1e-6 * scale


def test_extreme_arguments_log_scaled():
    # z = -sinh^2(x/2) for x = 800 overflows double, the mantissa form does not
    p = HypergeomParams.radial(5, 0.7)
    rep = eval_2f1_sinh(p, 800.0)
    t = log1mz_from_geodesic(800.0)
    assert rep.log_scale == pytest.approx(-2.0 * t, rel=1e-12)
    mpmath.mp.dps = 40
    try:
        ref = mpmath.re(mpmath.hyp2f1(2 + 0.7j, 2 - 0.7j, 2.5, -mpmath.sinh(400) ** 2))
        ref_mant = float(ref / mpmath.exp(rep.log_scale))
    finally:
        mpmath.mp.dps = 15
    assert rep.scaled_value == pytest.approx(ref_mant, rel=1e-8)


def test_log_grid_matches_pointwise():
    p = HypergeomParams.radial(4, 1.3)
    t = np.array([0.0, 0.1, 0.5, 1.0, 3.0, 8.0, 30.0])
    mant, logs = eval_2f1_log_grid(p, t)
    for ti, m, ls in zip(t, mant, logs):
        rep = eval_2f1_log(p, float(ti))
        assert m * math.exp(ls) == pytest.approx(rep.value, rel=1e-9, abs=1e-300)


def test_log1mz_geodesic_branches():
    for x in (0.3, 1.9, 2.1, 10.0):
        assert log1mz_from_geodesic(x) == pytest.approx(math.log1p(math.sinh(x / 2) ** 2), rel=1e-14)


# --- continued fraction -------------------------------------------------

# R_3/(R_5 sinh rho) with lambda = 1 + pi^2 (kappa = 1), mpmath at 30 digits
RATIO_ORACLE = [(0.25, 3.8487558341116259244), (0.5, 1.6743435621241017744), (0.9, 0.3274501373305060309)]


@pytest.mark.parametrize("rho,expected", RATIO_ORACLE)
def test_ratio_cf_matches_quotient(rho, expected):
    assert ratio_cf(3, 1.0, 1.0 + math.pi**2, rho) == pytest.approx(expected, rel=1e-10)


def test_ratio_cf_at_dirichlet_boundary_vanishes():
    # R_3(1) = 0 for lambda = 1 + pi^2, so the quotient is zero there
    assert abs(ratio_cf(3, 1.0, 1.0 + math.pi**2, 1.0)) <= 1e-12


@given(st.integers(2, 7), st.floats(0.3, 3.0), st.floats(0.2, 8.0))
def test_ratio_cf_decreasing_up_to_radius(n, kappa, kr):
    from hypeig.hyperball import BallSpec, eigen

    r = kr / kappa  # the fraction converges quickly while kappa * rho stays moderate
    lam = eigen(BallSpec(n, kappa, r)).lam
    rhos = np.linspace(r / 40, r, 40)
    vals = [ratio_cf(n, kappa, lam, float(x)) for x in rhos]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_ratio_cf_limits():
    lam = 1.0 + math.pi**2
    near = [ratio_cf(3, 1.0, lam, r) for r in (1e-2, 1e-4, 1e-6)]
    assert near[0] < near[1] < near[2] and near[2] > 1e5
    # away from the origin the fraction still converges and matches the quotient
    R = lambda th, x: eval_2f1_sinh(HypergeomParams.radial(th, math.pi), x).value  # noqa: E731
    for x in (1.5, 4.5, 8.5):
        q = R(3, x) / (R(5, x) * math.sinh(x))
        assert ratio_cf(3, 1.0, lam, x) == pytest.approx(q, rel=1e-8)


def test_ratio_cf_reports_slow_convergence():
    with pytest.raises(NumericalError):
        ratio_cf(3, 1.0, 1.0 + math.pi**2, 30.0)


def test_ratio_cf_rejects_low_lambda():
    with pytest.raises(ParameterError):
        ratio_cf(3, 1.0, 0.5, 1.0)
