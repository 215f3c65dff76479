import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov.errors import ConfigError, LengthMismatch, NonPositiveRadius, NonStarShaped, UnsupportedDimension
from steklov.geometry import (
    DomainKind,
    DomainSpec,
    boundary_integrate,
    curvature_field,
    field_from_csv,
    field_from_principal,
    field_to_csv,
    make_domain,
    star_boundary,
)

STAR = DomainSpec(DomainKind.STAR_PLANAR, 1, radial_coeffs=((3, 0.1, 0.0), (2, 0.0, -0.05)))


def test_boundary_volumes():
    assert make_domain(DomainSpec(DomainKind.DISK, 1, radius=2.0)).boundary_volume == pytest.approx(4 * math.pi)
    ann = make_domain(DomainSpec(DomainKind.ANNULUS, 1, inner_radius=0.25))
    assert ann.boundary_volume == pytest.approx(2 * math.pi * 1.25)
    assert make_domain(DomainSpec(DomainKind.BALL, 2)).boundary_volume == pytest.approx(4 * math.pi)
    assert make_domain(DomainSpec(DomainKind.BALL, 3)).boundary_volume == pytest.approx(2 * math.pi**2)


def test_star_length_matches_polyline():
    spec = make_domain(STAR)
    th = np.linspace(0, 2 * np.pi, 200001)
    z = star_boundary(spec, th)[0]
    assert spec.boundary_volume == pytest.approx(np.sum(np.abs(np.diff(z))), rel=1e-9)


def test_bad_specs():
    with pytest.raises(NonPositiveRadius):
        make_domain(DomainSpec(DomainKind.DISK, 1, radius=-1.0))
    with pytest.raises(NonStarShaped):
        make_domain(DomainSpec(DomainKind.STAR_PLANAR, 1, radial_coeffs=((2, 1.2, 0.0),)))
    with pytest.raises(UnsupportedDimension):
        make_domain(DomainSpec(DomainKind.DISK, 2))
    with pytest.raises(ConfigError):
        make_domain(DomainSpec(DomainKind.ANNULUS, 1, inner_radius=1.5))


def test_json_round_trip_and_unknown_keys():
    spec = make_domain(STAR)
    back = make_domain(DomainSpec.from_json(spec.to_json()))
    assert back == spec
    with pytest.raises(ConfigError):
        DomainSpec.from_dict({"kind": "Disk", "n": 1, "colour": "red"})


def test_star_curvature_against_finite_differences():
    spec = make_domain(STAR)
    fld = curvature_field(spec, 64)
    th = 2 * np.pi * np.arange(64) / 64
    h = 1e-3
    z = [star_boundary(spec, th + j * h)[0] for j in (-2, -1, 0, 1, 2)]
    d1 = (z[0] - 8 * z[1] + 8 * z[3] - z[4]) / (12 * h)
    d2 = (-z[0] + 16 * z[1] - 30 * z[2] + 16 * z[3] - z[4]) / (12 * h * h)
    kappa = np.imag(np.conj(d1) * d2) / np.abs(d1) ** 3
    assert np.max(np.abs(fld.kappa[:, 0] - kappa)) < 1e-8


def test_turning_number():
    fld = curvature_field(STAR, 256)
    assert boundary_integrate(fld, fld.kappa[:, 0]) == pytest.approx(2 * math.pi, abs=1e-12)


def test_annulus_inner_curvature_negative():
    fld = curvature_field(DomainSpec(DomainKind.ANNULUS, 1, inner_radius=0.5), 16)
    assert np.allclose(fld.kappa[16:, 0], -2.0)
    assert boundary_integrate(fld, fld.kappa[:, 0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_gauss_relation(n):
    fld = curvature_field(DomainSpec(DomainKind.BALL, n), 16)
    assert np.allclose(fld.scalar_boundary, n * (n - 1))
    assert np.allclose(fld.scalar_boundary, fld.q1 / 2)
    assert np.allclose(fld.scalar_ambient, 0.0)
    assert boundary_integrate(fld, 1.0) == pytest.approx(make_domain(DomainSpec(DomainKind.BALL, n)).boundary_volume)


def test_principal_field_gauss():
    rng = np.random.default_rng(3)
    k = rng.normal(size=(5, 3))
    fld = field_from_principal(np.ones(5), k)
    q1 = np.array([sum(a * b for i, a in enumerate(row) for j, b in enumerate(row) if i != j) for row in k])
    assert np.allclose(fld.scalar_boundary, q1)


def test_field_csv_round_trip():
    fld = curvature_field(DomainSpec(DomainKind.BALL, 2), 8)
    back = field_from_csv(field_to_csv(fld))
    assert np.array_equal(back.kappa, fld.kappa)
    assert np.array_equal(back.weights, fld.weights)


def test_length_mismatch():
    fld = curvature_field(DomainSpec(DomainKind.DISK, 1), 8)
    with pytest.raises(LengthMismatch):
        boundary_integrate(fld, np.ones(7))


@given(st.floats(0.2, 5.0))
def test_curvature_scales_inversely(s):
    a = curvature_field(STAR, 32)
    b = curvature_field(STAR.scaled(s), 32)
    assert np.allclose(b.kappa, a.kappa / s, rtol=1e-12)
    assert np.allclose(b.weights, a.weights * s, rtol=1e-12)
