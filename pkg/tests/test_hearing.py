import math

import numpy as np
import pytest

from steklov.errors import IllConditionedFit, NotRecoverable, WindowTooNarrow
from steklov.geometry import DomainKind, DomainSpec
from steklov.hearing import (
    a1_prefactor,
    comparison_table,
    fit_expansion,
    invert_geometry,
    mean_curvature_integral,
    select_window,
)
from steklov.heat_trace import HeatTraceSamples, trace_samples
from steklov.spectrum import steklov_closed_form


def synthetic(coeffs, n, t, extra=()):
    z = sum(c * t ** (m - n) for m, c in enumerate(coeffs))
    for power, c in extra:
        z = z + c * t**power
    return HeatTraceSamples(t, z, np.zeros_like(t))


def test_recovers_exact_series():
    t = np.geomspace(1e-3, 1e-1, 81)
    s = synthetic([3.0, -1.5, 0.25], 2, t, extra=[(1, 0.7), (2, -0.2)])
    fit = fit_expansion(s, 2, 3, include_log=False)
    assert np.allclose(fit.coefficients, [3.0, -1.5, 0.25], rtol=1e-9, atol=1e-9)
    assert fit.guard_coefficients == pytest.approx((0.7, -0.2), rel=1e-6)


def test_log_column_defaults_on_when_n_is_M_minus_1():
    t = np.geomspace(1e-3, 1e-1, 81)
    s = HeatTraceSamples(t, 2 / t**2 + 1 / t + 0.3 * np.log(t) + 0.1, np.zeros_like(t))
    fit = fit_expansion(s, 2, 3)
    assert fit.log_coefficient == pytest.approx(0.3, rel=1e-8)
    assert fit.coefficients[2] == pytest.approx(0.1, rel=1e-6)


def test_window_too_narrow():
    t = np.geomspace(1e-3, 1e-2, 8)
    with pytest.raises(WindowTooNarrow):
        fit_expansion(synthetic([1.0], 1, t), 1, 2)


def test_ill_conditioned():
    t = np.geomspace(1.0, 1.0 + 1e-9, 40)
    with pytest.raises(IllConditionedFit):
        fit_expansion(synthetic([1.0, 1.0], 2, t), 2, 3)


def test_ball_recovery():
    sp = steklov_closed_form(DomainSpec(DomainKind.BALL, 2), 10**10)
    fit = fit_expansion(trace_samples(sp, *select_window(sp, 2, 3)), 2, 3)
    geo = invert_geometry(fit)
    assert geo.boundary_volume == pytest.approx(4 * math.pi, rel=1e-8)
    # integral of kappa_1 + kappa_2 over the unit sphere is 8 pi
    assert geo.mean_curvature_integral == pytest.approx(8 * math.pi, rel=1e-5)
    rows = comparison_table(fit, {0: 2.0, 1: 1.0, 2: 1 / 3})
    assert all(abs(r[3]) < 1e-3 for r in rows)


def test_disk_curvature_channel_is_silent():
    sp = steklov_closed_form(DomainSpec(DomainKind.DISK, 1), 10**6)
    fit = fit_expansion(trace_samples(sp, *select_window(sp, 1, 2)), 1, 2)
    assert invert_geometry(fit).boundary_volume == pytest.approx(2 * math.pi, rel=1e-8)
    assert invert_geometry(fit).mean_curvature_integral is None
    with pytest.raises(NotRecoverable):
        mean_curvature_integral(fit)


def test_a1_prefactor_on_spheres():
    # a_1 = prefactor * sum(kappa) with sum(kappa) = n on the unit sphere
    assert a1_prefactor(2) * 2 * 4 * math.pi == pytest.approx(1.0)
    assert a1_prefactor(3) * 3 * 2 * math.pi**2 == pytest.approx(2.0)


def test_fit_json():
    t = np.geomspace(1e-3, 1e-1, 81)
    fit = fit_expansion(synthetic([2.0, 1.0], 1, t), 1, 2)
    assert '"orders": [\n    0,\n    1\n  ]' in fit.to_json()
