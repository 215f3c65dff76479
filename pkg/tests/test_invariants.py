import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov.errors import OrderNotValidForDimension, PatternDimensionMismatch
from steklov.geometry import DomainKind, DomainSpec, curvature_field
from steklov.invariants import (
    SymbolPoint,
    a2_tilde,
    b4_comparison_report,
    coefficient_density,
    fractional_coefficients,
    integrated_coefficients,
    moment_integral,
    random_symbol_point,
    transcription_check,
)
from steklov.validation import MOMENT_PATTERNS, moment_quadrature


def field(kind, n, nodes=32):
    return curvature_field(DomainSpec(DomainKind(kind), n), nodes)


def test_ball_integrals_match_trace_expansions():
    # Z(t) of the unit disk is coth(t/2); of the ball in R^3, (1+x)/(1-x)^2; in R^4, (1+x)/(1-x)^3
    assert integrated_coefficients(field("Disk", 1)).integrals == pytest.approx({0: 2.0, 1: 0.0}, abs=1e-13)
    assert integrated_coefficients(field("Ball", 2)).integrals == pytest.approx({0: 2.0, 1: 1.0, 2: 1 / 3}, rel=1e-13)
    ints = integrated_coefficients(field("Ball", 3)).integrals
    assert [ints[m] for m in range(3)] == pytest.approx([2.0, 2.0, 1.0], rel=1e-13)


def test_valid_orders_follow_dimension():
    assert integrated_coefficients(field("Disk", 1)).valid_orders == (0, 1)
    assert integrated_coefficients(field("Ball", 3)).valid_orders == (0, 1, 2, 3)
    with pytest.raises(OrderNotValidForDimension):
        a2_tilde(SymbolPoint([1.0]))


def test_flat_boundary_densities_vanish():
    for n in (2, 3):
        p = SymbolPoint(np.zeros(n))
        for m in range(1, n + 1):
            if m <= 3:
                assert coefficient_density(p, m) == 0.0


def test_density_csv_shape():
    cs = integrated_coefficients(field("Ball", 2, 8))
    lines = cs.densities_csv().splitlines()
    assert lines[0] == "node_index,a0,a1,a2"
    assert len(lines) == 1 + len(cs.densities[0])


@settings(max_examples=15)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_symbol_oracle_agrees_with_closed_forms(n, seed, level):
    p = random_symbol_point(n, np.random.default_rng(seed))
    oracle, target = transcription_check(p, level, 1.0)
    assert oracle == pytest.approx(target, rel=1e-6, abs=1e-9)


@settings(max_examples=10)
@given(st.floats(0.2, 3.0), st.integers(0, 1000))
def test_oracle_time_scaling(t, seed):
    # level-2 diagonal scales as t^(1-n)
    p = random_symbol_point(2, np.random.default_rng(seed))
    o1, _ = transcription_check(p, 2, 1.0)
    ot, _ = transcription_check(p, 2, t)
    assert ot == pytest.approx(o1 / t, rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("n,m", [(1, 0), (2, 1), (3, 2), (3, -1)])
def test_moment_table_against_quadrature(n, m):
    for pat in MOMENT_PATTERNS:
        if len(pat) > n:
            continue
        want = moment_quadrature(n, m, pat)
        scale = math.gamma(n + m) * 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert abs(moment_integral(n, m, pat) - want) <= 1e-8 * scale


def test_moment_errors():
    with pytest.raises(PatternDimensionMismatch):
        moment_integral(2, 1, (2, 2, 2))
    with pytest.raises(PatternDimensionMismatch):
        moment_integral(2, -2)
    with pytest.raises(PatternDimensionMismatch):
        moment_integral(3, 1, (8,))


def test_fractional_coefficients_on_the_sphere():
    fc = fractional_coefficients(field("Ball", 2))
    assert fc.powers == (-2, 0, 2, 4)
    assert fc.consistent == pytest.approx((2.0, 1 / 3, -1 / 30, 1 / 945), rel=1e-12)
    assert fc.literal[:2] == pytest.approx((2.0, 2 / 3), rel=1e-12)
    assert fc.euler["chi_gauss_bonnet"] == pytest.approx(2.0)


def test_b4_report_is_informational():
    rep = b4_comparison_report(8)
    assert rep["gating"] is False
    assert rep["exact_trace_constant"] == pytest.approx(1 / 3)
    assert set(rep) >= {"literal_a3_integral", "symbol_oracle_level4_integral", "literal_minus_exact"}
