import math

import pytest
from hypothesis import given, strategies as st

from hypeig.asymptotics import (
    Parity,
    bessel_first_zero,
    bounds,
    correction_sequence,
    fit_expansion_constant,
    harmonic_constant,
    large_r_expansion,
    recurrence_constants,
    savo_constant,
    savo_integral,
    small_r_expansion,
)
from hypeig.errors import NumericalError, ParameterError
from hypeig.hyperball import BallSpec, eigen

LN2 = math.log(2.0)
GRID = [20.0, 40.0, 80.0, 160.0]


def test_bessel_zeros():
    assert bessel_first_zero(0.5) == pytest.approx(math.pi, abs=1e-10)
    assert bessel_first_zero(0.0) == pytest.approx(2.4048255577, abs=1e-10)
    phi = bessel_first_zero(1.5)
    assert phi == pytest.approx(4.4934094579, abs=1e-10)
    assert abs(phi * math.cos(phi) - math.sin(phi)) < 1e-12


@pytest.mark.parametrize(
    "parity,l,expected",
    [("odd", 2, math.pi), ("odd", 3, 1.5 * math.pi), ("odd", 4, 11 * math.pi / 6),
     ("even", 1, -2 * math.pi * LN2), ("even", 2, 2 * math.pi * (1 - LN2)),
     ("even", 3, 2 * math.pi * (4 / 3 - LN2))],
)
def test_recurrence_constants(parity, l, expected):  # noqa: E741
    c = recurrence_constants(parity, l)
    assert c.c_l == pytest.approx(expected, rel=1e-12)
    assert c.harmonic_sum == pytest.approx(expected / math.pi, rel=1e-12)
    assert c.parity is Parity(parity)


def test_c1_numeric():
    assert recurrence_constants(Parity.EVEN, 1).c_l == pytest.approx(-4.35517, abs=1e-5)


@given(st.integers(2, 60))
def test_recurrences_match_closed_forms(l):  # noqa: E741
    for parity in Parity:
        c = recurrence_constants(parity, l)
        assert abs(c.c_l - math.pi * harmonic_constant(parity, l)) <= 1e-12 * max(1.0, abs(c.c_l))


@pytest.mark.parametrize("parity,l", [("odd", 1), ("odd", 0), ("even", 0), ("odd", 2.5), ("sideways", 3)])
def test_recurrence_parameter_errors(parity, l):  # noqa: E741
    with pytest.raises((ParameterError, ValueError)):
        recurrence_constants(parity, l)


def test_large_r_examples():
    assert large_r_expansion(3, 1.0, 10.0) == pytest.approx(1 + math.pi**2 / 100, rel=1e-15)
    assert large_r_expansion(5, 1.0, 20.0) == pytest.approx(4 + math.pi**2 / 400 * (1 + 1 / 20) ** 2, rel=1e-15)
    assert large_r_expansion(2, 1.0, 20.0) == pytest.approx(0.25 + math.pi**2 / 400 * (1 - LN2 / 10) ** 2, rel=1e-15)


def test_small_r_examples():
    j32 = bessel_first_zero(1.5)
    assert small_r_expansion(5, 1.0, 0.3) == pytest.approx(j32**2 / 0.09 + 10 / 3, rel=1e-14)
    assert small_r_expansion(3, 1.0, 0.3) == pytest.approx(math.pi**2 / 0.09 + 1, rel=1e-14)
    j0 = bessel_first_zero(0.0)
    # n (n - 1) kappa**2 / 6 = 2 * 4 / 6
    assert small_r_expansion(2, 2.0, 0.3) == pytest.approx(j0**2 / 0.09 + 4 / 3, rel=1e-14)


def test_savo_integral_and_constant():
    assert savo_integral() == pytest.approx(1.6449340668, abs=1e-10)
    assert savo_integral() == pytest.approx(math.pi**2 / 6, rel=1e-13)
    assert savo_constant(3) == pytest.approx(4 * math.pi**2 * math.pi**2 / 6, rel=1e-13)


def test_savo_n3_r4():
    b = bounds(BallSpec(3, 1.0, 4.0))
    base = 1 + math.pi**2 / 16
    assert b.savo_lower == pytest.approx(base - 4 * math.pi**2 / (2 * 64), rel=1e-14)
    assert b.savo_upper == pytest.approx(base + savo_constant(3) / 64, rel=1e-14)
    assert b.mckean_lower == b.cheng_upper == 1.0


def test_bf_n2_r1():
    b = bounds(BallSpec(2, 1.0, 1.0))
    j0 = bessel_first_zero(0.0)
    gap = 1.0 - 1.0 / math.sinh(1.0) ** 2
    assert b.bf_lower == pytest.approx(j0**2 + 0.25 * (gap + 1), rel=1e-14)
    assert b.bf_upper == pytest.approx(j0**2 + 1 / 3, rel=1e-14)
    assert b.bf_lower <= eigen(BallSpec(2, 1.0, 1.0)).lam <= b.bf_upper


def test_bf_unavailable_off_unit_curvature():
    b = bounds(BallSpec(4, 2.0, 1.0))
    assert b.bf_lower is None and b.bf_upper is None
    assert b.to_dict()["bf_lower"] is None


@given(st.integers(2, 9), st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.1, 40.0))
def test_bound_ordering(n, kappa, r):
    b = bounds(BallSpec(n, kappa, r))
    assert b.savo_lower <= b.savo_upper
    if b.bf_lower is not None:
        assert b.bf_lower <= b.bf_upper


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0, 10.0, 30.0])
def test_savo_coherence(n, r):
    lam = eigen(BallSpec(n, 1.0, r)).lam
    b = bounds(BallSpec(n, 1.0, r))
    assert b.savo_lower <= lam <= b.savo_upper


@pytest.mark.parametrize("n,expected", [(5, math.pi), (2, -2 * math.pi * LN2), (7, 1.5 * math.pi)])
def test_fit_expansion_constant(n, expected):
    est = fit_expansion_constant(n, GRID)
    assert est == pytest.approx(expected, rel=1e-2)


def test_fit_n3_vanishes():
    est, rep = fit_expansion_constant(3, [25.0, 50.0, 75.0, 100.0, 150.0], return_report=True)
    assert abs(est) < 1e-8
    assert len(rep["diagonal"]) == 5


@pytest.mark.parametrize("grid", [[20, 40, 80], [10, 40, 80, 160], [20, 80, 40, 160]])
def test_fit_preconditions(grid):
    with pytest.raises(ParameterError):
        fit_expansion_constant(5, grid)


def test_fit_reports_ill_conditioning():
    # nearly coincident radii make the extrapolation blow up
    with pytest.raises(NumericalError) as info:
        fit_expansion_constant(5, [20.0, 20.0 + 1e-9, 20.0 + 2e-9, 20.0 + 3e-9])
    assert "spread" in info.value.partial


def test_exponent_rigidity():
    radii = [20.0, 40.0, 80.0, 160.0, 320.0]
    low = correction_sequence(5, radii, 1.5)
    high = correction_sequence(5, radii, 2.5)
    assert all(b < a for a, b in zip(low, low[1:]))
    assert low[-1] < 0.25 * low[0]
    assert all(b > a for a, b in zip(high, high[1:]))
    assert high[-1] > 3.5 * high[0]
    # the right exponent settles near c_2 = pi
    mid = correction_sequence(5, radii, 2.0)
    assert abs(mid[-1] - math.pi) < abs(mid[0] - math.pi)


@pytest.mark.parametrize("n", [2, 4, 5, 7])
def test_small_r_convergence(n):
    seq = [abs(eigen(BallSpec(n, 1.0, r)).lam - small_r_expansion(n, 1.0, r)) * r * r for r in (0.2, 0.1, 0.05, 0.025)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert seq[-1] < 1e-6


@pytest.mark.parametrize("n", [2, 4, 5, 6])
def test_large_r_ratio_halving(n):
    radii = [20.0, 40.0, 80.0, 160.0, 320.0]
    scaled = [abs(eigen(BallSpec(n, 1.0, r)).lam - large_r_expansion(n, 1.0, r)) * r**3 for r in radii]
    ratios = [b / a for a, b in zip(scaled, scaled[1:])]
    assert all(q < 0.7 for q in ratios)
    # the next term is O(r**-4), so each doubling should end up near 1/2
    assert abs(ratios[-1] - 0.5) < 0.05


def test_odd_even_harmonic_ratio():
    ratio = harmonic_constant(Parity.ODD, 50) / harmonic_constant(Parity.EVEN, 50)
    assert abs(ratio - 1) < 0.02
