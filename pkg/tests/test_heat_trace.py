import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.errors import MissingVolumeMetadata, NonPositiveTime, TailTooLarge
from steklov.geometry import DomainKind, DomainSpec
from steklov.heat_trace import (
    HeatTraceSamples,
    minimal_t,
    model_kernel_diagonal,
    partial_trace,
    partial_traces,
    trace_samples,
    trace_value,
    weyl_tail,
)
from steklov.spectrum import Spectrum, steklov_closed_form

DISK = steklov_closed_form(DomainSpec(DomainKind.DISK, 1), 40001)
BALL2 = steklov_closed_form(DomainSpec(DomainKind.BALL, 2), 20000**2)


@pytest.mark.parametrize("t", ["0.01", "0.1", "1.0"])
def test_traces_against_extended_precision(frozen, t):
    assert partial_trace(DISK, float(t)) == pytest.approx(frozen["disk_trace"][t], rel=1e-13)
    assert partial_trace(BALL2, float(t)) == pytest.approx(frozen["ball2_trace"][t], rel=1e-13)


def test_vectorized_sum_matches_fsum():
    ts = np.geomspace(1e-3, 3, 25)
    fast = partial_traces(BALL2, ts)
    slow = [math.fsum(BALL2.multiplicities * np.exp(-BALL2.eigenvalues * t)) for t in ts]
    assert np.allclose(fast, slow, rtol=1e-14)


def test_closed_forms():
    for t in (0.05, 0.5, 2.0):
        assert partial_trace(DISK, t) == pytest.approx(1 / math.tanh(t / 2), rel=1e-13)
        x = math.exp(-t)
        assert partial_trace(BALL2, t) == pytest.approx((1 + x) / (1 - x) ** 2, rel=1e-13)


def test_model_kernel_is_trace_over_volume():
    for t in (0.01, 1.0):
        assert model_kernel_diagonal(DomainSpec(DomainKind.DISK, 1), t) * 2 * math.pi == pytest.approx(partial_trace(DISK, t))
        assert model_kernel_diagonal(DomainSpec(DomainKind.BALL, 2), t) * 4 * math.pi == pytest.approx(partial_trace(BALL2, t))


def test_tail_estimate_bounds_the_true_remainder():
    short = steklov_closed_form(DomainSpec(DomainKind.DISK, 1), 2001)
    for t in (0.002, 0.005, 0.01):
        true_tail = partial_trace(DISK, t) - partial_trace(short, t)
        assert true_tail <= weyl_tail(short, t)
        assert weyl_tail(short, t) < 3 * true_tail


def test_trace_samples_and_csv():
    s = trace_samples(DISK, 1e-2, 1.0)
    assert len(s.t_grid) == 81
    back = HeatTraceSamples.from_csv(s.to_csv())
    assert np.array_equal(back.values, s.values)
    w = s.window(0.1, 0.5)
    assert w.t_grid[0] >= 0.1 * (1 - 1e-12) and w.t_grid[-1] <= 0.5 * (1 + 1e-12)


def test_refuses_large_tail():
    short = steklov_closed_form(DomainSpec(DomainKind.DISK, 1), 101)
    with pytest.raises(TailTooLarge):
        trace_samples(short, 1e-3, 1.0)
    t = minimal_t(short)
    trace_samples(short, t * 1.01, 1.0)


def test_errors():
    with pytest.raises(NonPositiveTime):
        trace_value(DISK, 0.0)
    bare = Spectrum(np.array([0.0, 1.0]), np.array([1, 2]), 1, None)
    with pytest.raises(MissingVolumeMetadata):
        weyl_tail(bare, 1.0)


@given(st.floats(1e-3, 5.0), st.floats(1.01, 3.0))
def test_monotone_and_log_convex(t, r):
    a, b, c = partial_traces(BALL2, [t, t * r, t * r * r])
    assert b < a
    # log Z is convex in t: check on three points in geometric position
    t1, t2, t3 = t, t * r, t * r * r
    lam = (t3 - t2) / (t3 - t1)
    assert math.log(b) <= lam * math.log(a) + (1 - lam) * math.log(c) + 1e-12
