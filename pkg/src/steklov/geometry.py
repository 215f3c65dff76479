"""Model domains, boundary quadrature and curvature data.

Conventions: the boundary has dimension n and sits in an (n+1)-dimensional
ambient space. Principal curvatures are taken with respect to the outward
normal, so the unit circle and the unit sphere have kappa = +1 and the inner
circle of an annulus has negative curvature.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Optional

import numpy as np

from ._quadrature import sphere_rule, sphere_volume
from .errors import (
    ConfigError,
    LengthMismatch,
    NonPositiveRadius,
    NonStarShaped,
    UnsupportedDimension,
)


class DomainKind(str, enum.Enum):
    DISK = "Disk"
    ANNULUS = "Annulus"
    STAR_PLANAR = "StarPlanar"
    BALL = "Ball"
    ROUND_SPHERE = "RoundSphereBoundary"
    CUSTOM = "CustomField"


PLANAR_KINDS = (DomainKind.DISK, DomainKind.ANNULUS, DomainKind.STAR_PLANAR)


@dataclass(frozen=True)
class DomainSpec:
    """A model domain. ``n`` is the boundary dimension.

    For StarPlanar the boundary is r(theta) = radius + sum a_k cos(k theta) +
    b_k sin(k theta), with ``radial_coeffs`` a tuple of (k, a_k, b_k).
    ``boundary_volume`` is filled by :func:`make_domain`.
    """

    kind: DomainKind
    n: int
    radius: float = 1.0
    inner_radius: Optional[float] = None
    radial_coeffs: tuple = ()
    label: str = ""
    boundary_volume: Optional[float] = None

    def to_json(self) -> str:
        doc = {"kind": self.kind.value, "n": self.n, "radius": self.radius}
        if self.inner_radius is not None:
            doc["inner_radius"] = self.inner_radius
        if self.radial_coeffs:
            doc["radial_coeffs"] = [[int(k), float(a), float(b)] for k, a, b in self.radial_coeffs]
        doc["label"] = self.label
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DomainSpec":
        doc = json.loads(text)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "DomainSpec":
        allowed = {"kind", "n", "radius", "inner_radius", "radial_coeffs", "label"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"unknown domain keys: {sorted(unknown)}")
        try:
            kind = DomainKind(doc["kind"])
            n = int(doc["n"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad domain document: {exc}") from exc
        coeffs = tuple((int(k), float(a), float(b)) for k, a, b in doc.get("radial_coeffs", []) or [])
        inner = doc.get("inner_radius")
        return cls(
            kind=kind,
            n=n,
            radius=float(doc.get("radius", 1.0)),
            inner_radius=None if inner is None else float(inner),
            radial_coeffs=coeffs,
            label=str(doc.get("label", "")),
        )

    def scaled(self, s: float) -> "DomainSpec":
        """Dilate the domain by s."""
        coeffs = tuple((k, s * a, s * b) for k, a, b in self.radial_coeffs)
        return make_domain(
            replace(self, radius=self.radius * s, radial_coeffs=coeffs, boundary_volume=None)
        )


def _radial(spec: DomainSpec, theta: np.ndarray, deriv: int = 0) -> np.ndarray:
    """r(theta) or its exact derivative from the Fourier series."""
    out = np.full_like(theta, spec.radius if deriv == 0 else 0.0, dtype=float)
    for k, a, b in spec.radial_coeffs:
        c, s = np.cos(k * theta), np.sin(k * theta)
        if deriv == 0:
            out += a * c + b * s
        elif deriv == 1:
            out += k * (-a * s + b * c)
        elif deriv == 2:
            out += -k * k * (a * c + b * s)
        else:
            raise ValueError("deriv must be 0, 1 or 2")
    return out


def star_boundary(spec: DomainSpec, theta: np.ndarray):
    """Boundary points z(theta), tangent dz/dtheta and speed |dz/dtheta|."""
    r = _radial(spec, theta)
    dr = _radial(spec, theta, 1)
    e = np.exp(1j * theta)
    z = r * e
    dz = (dr + 1j * r) * e
    return z, dz, np.abs(dz)


def make_domain(spec: DomainSpec) -> DomainSpec:
    """Validate a spec and attach the boundary volume."""
    kind = DomainKind(spec.kind)
    if not np.isfinite(spec.radius) or spec.radius <= 0:
        raise NonPositiveRadius(f"radius must be positive, got {spec.radius}")
    if kind in PLANAR_KINDS and spec.n != 1:
        raise UnsupportedDimension(f"{kind.value} requires n = 1, got n = {spec.n}")
    if kind in (DomainKind.BALL, DomainKind.ROUND_SPHERE) and spec.n < 2:
        raise UnsupportedDimension(f"{kind.value} requires n >= 2, got n = {spec.n}")
    if spec.n < 1:
        raise UnsupportedDimension("n must be at least 1")

    R = spec.radius
    if kind == DomainKind.DISK:
        vol = 2 * math.pi * R
    elif kind == DomainKind.ANNULUS:
        rho = spec.inner_radius
        if rho is None or not (0.0 < rho < 1.0):
            raise ConfigError(f"Annulus needs inner_radius in (0, 1), got {rho}")
        vol = 2 * math.pi * R * (1 + rho)
    elif kind == DomainKind.STAR_PLANAR:
        kmax = max([abs(k) for k, _, _ in spec.radial_coeffs] + [1])
        m = max(4096, 64 * kmax)
        theta = 2 * np.pi * np.arange(m) / m
        r = _radial(spec, theta)
        if np.min(r) <= 0:
            raise NonStarShaped(f"r(theta) reaches {np.min(r):.3g} <= 0")
        _, _, speed = star_boundary(spec, theta)
        vol = float(np.sum(speed) * 2 * np.pi / m)
    elif kind in (DomainKind.BALL, DomainKind.ROUND_SPHERE):
        vol = sphere_volume(spec.n + 1) * R ** spec.n
    else:
        vol = spec.boundary_volume
    return replace(spec, kind=kind, boundary_volume=vol)


@dataclass(frozen=True)
class CurvatureField:
    """Curvature samples at boundary quadrature nodes.

    Arrays are indexed by node first. ``ricci_ambient_normal[:, j]`` holds
    R~_{j(n+1)j(n+1)} and ``covderiv_normal`` the sum over j of its normal
    covariant derivative. The full tangential ambient tensor
    (``ambient_tangent``) and the normal matrices are optional and only used
    to build symbol points; the scalar columns are authoritative.
    """

    n: int
    weights: np.ndarray
    kappa: np.ndarray
    scalar_boundary: np.ndarray
    scalar_ambient: np.ndarray
    ricci_ambient_normal: np.ndarray
    ricci_boundary: np.ndarray
    ricci_ambient_tangent: np.ndarray
    covderiv_normal: np.ndarray
    points: Optional[np.ndarray] = None
    ricci_sq: Optional[np.ndarray] = None
    riemann_sq: Optional[np.ndarray] = None
    constant_curvature: Optional[float] = None
    ambient_tangent: Optional[np.ndarray] = None
    ambient_normal: Optional[np.ndarray] = None
    ambient_normal_deriv: Optional[np.ndarray] = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def num_nodes(self) -> int:
        return len(self.weights)

    @property
    def trace_A(self) -> np.ndarray:
        return self.kappa.sum(axis=1)

    @property
    def sum_kappa2(self) -> np.ndarray:
        return (self.kappa**2).sum(axis=1)

    @property
    def sum_kappa3(self) -> np.ndarray:
        return (self.kappa**3).sum(axis=1)

    @property
    def q1(self) -> np.ndarray:
        return principal_q1(self.kappa)

    @property
    def q2(self) -> np.ndarray:
        return principal_q2(self.kappa)

    @property
    def q3(self) -> np.ndarray:
        return principal_q3(self.kappa, self.ricci_ambient_normal)


def principal_q1(kappa: np.ndarray) -> np.ndarray:
    """4 * sum_{j<k} kappa_j kappa_k, along the last axis."""
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    out = np.zeros(kappa.shape[:-1])
    for j, k in combinations(range(n), 2):
        out = out + kappa[..., j] * kappa[..., k]
    return 4.0 * out


def principal_q2(kappa: np.ndarray) -> np.ndarray:
    """-8 * sum_{j<k<l} kappa_j kappa_k kappa_l."""
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    out = np.zeros(kappa.shape[:-1])
    for j, k, l in combinations(range(n), 3):
        out = out + kappa[..., j] * kappa[..., k] * kappa[..., l]
    return -8.0 * out


def principal_q3(kappa: np.ndarray, ambient_normal_diag: np.ndarray) -> np.ndarray:
    """Q3 with A diagonal.

    The general definition sums over j != k of
    (-2A)_jj (-2 R~_kk' + 2(A^2)_kk) - (-2A)_jk (-2 R~_kj' + 2(A^2)_kj);
    in principal coordinates the second product vanishes.
    """
    kappa = np.asarray(kappa, dtype=float)
    nd = np.asarray(ambient_normal_diag, dtype=float)
    n = kappa.shape[-1]
    out = np.zeros(kappa.shape[:-1])
    for j in range(n):
        for k in range(n):
            if j != k:
                out = out + (-2 * kappa[..., j]) * (-2 * nd[..., k] + 2 * kappa[..., k] ** 2)
    return out


def _constant_sphere_field(n, R, weights, points, label):
    m = len(weights)
    kap = 1.0 / R
    K = kap * kap
    full = lambda v: np.full(m, float(v))
    return CurvatureField(
        n=n,
        weights=weights,
        kappa=np.full((m, n), kap),
        scalar_boundary=full(n * (n - 1) * K),
        scalar_ambient=full(0.0),
        ricci_ambient_normal=np.zeros((m, n)),
        ricci_boundary=np.full((m, n), (n - 1) * K),
        ricci_ambient_tangent=np.zeros((m, n)),
        covderiv_normal=full(0.0),
        points=points,
        ricci_sq=full(n * (n - 1) ** 2 * K * K),
        riemann_sq=full(2 * n * (n - 1) * K * K),
        constant_curvature=K,
        label=label,
    )


def _curve_field(weights, kappa, points, label):
    m = len(weights)
    zeros1 = np.zeros((m, 1))
    return CurvatureField(
        n=1,
        weights=weights,
        kappa=kappa.reshape(m, 1),
        scalar_boundary=np.zeros(m),
        scalar_ambient=np.zeros(m),
        ricci_ambient_normal=zeros1,
        ricci_boundary=zeros1.copy(),
        ricci_ambient_tangent=zeros1.copy(),
        covderiv_normal=np.zeros(m),
        points=points,
        ricci_sq=np.zeros(m),
        riemann_sq=np.zeros(m),
        constant_curvature=0.0,
        label=label,
    )


def curvature_field(spec: DomainSpec, num_nodes: int) -> CurvatureField:
    """Quadrature nodes and curvature data for a model domain.

    For planar curves ``num_nodes`` is the number of trapezoid points per
    boundary component. For spheres it is twice the polar Gauss order, so S^2
    gets num_nodes/2 Gauss-Legendre rings of num_nodes azimuthal points.
    """
    if num_nodes < 8:
        raise ConfigError("num_nodes must be at least 8")
    spec = make_domain(spec)
    kind = spec.kind
    R = spec.radius
    if kind == DomainKind.CUSTOM:
        raise UnsupportedDimension("CustomField data must be supplied directly")

    if kind in (DomainKind.DISK, DomainKind.ANNULUS):
        theta = 2 * np.pi * np.arange(num_nodes) / num_nodes
        circ = np.column_stack([np.cos(theta), np.sin(theta)])
        w = np.full(num_nodes, 2 * np.pi * R / num_nodes)
        kap = np.full(num_nodes, 1.0 / R)
        pts = R * circ
        if kind == DomainKind.ANNULUS:
            r_in = spec.inner_radius * R
            w = np.concatenate([w, np.full(num_nodes, 2 * np.pi * r_in / num_nodes)])
            kap = np.concatenate([kap, np.full(num_nodes, -1.0 / r_in)])
            pts = np.vstack([pts, r_in * circ])
        return _curve_field(w, kap, pts, spec.label)

    if kind == DomainKind.STAR_PLANAR:
        theta = 2 * np.pi * np.arange(num_nodes) / num_nodes
        r = _radial(spec, theta)
        r1 = _radial(spec, theta, 1)
        r2 = _radial(spec, theta, 2)
        speed = np.sqrt(r * r + r1 * r1)
        kap = (r * r + 2 * r1 * r1 - r * r2) / speed**3
        w = speed * 2 * np.pi / num_nodes
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        return _curve_field(w, kap, pts, spec.label)

    order = max(4, num_nodes // 2)
    pts, w = sphere_rule(spec.n + 1, order)
    return _constant_sphere_field(spec.n, R, w * R**spec.n, R * pts, spec.label)


def field_from_principal(
    weights,
    kappa,
    ambient_tangent=None,
    ambient_normal=None,
    ambient_normal_deriv=None,
    label: str = "custom",
) -> CurvatureField:
    """Build a CustomField from principal curvatures and ambient entries.

    ``ambient_tangent`` has shape (m, n, n, n, n) and holds R~_jklm on the
    boundary frame; ``ambient_normal`` (m, n, n) holds R~_{j(n+1)k(n+1)} and
    ``ambient_normal_deriv`` its normal covariant derivative. Intrinsic
    curvature follows from the Gauss equation with A = diag(kappa).
    """
    w = np.asarray(weights, dtype=float)
    kap = np.atleast_2d(np.asarray(kappa, dtype=float))
    m, n = kap.shape
    if len(w) != m:
        raise LengthMismatch("weights and kappa disagree on node count")
    Rt = np.zeros((m, n, n, n, n)) if ambient_tangent is None else np.asarray(ambient_tangent, float)
    Nm = np.zeros((m, n, n)) if ambient_normal is None else np.asarray(ambient_normal, float)
    Dm = np.zeros((m, n, n)) if ambient_normal_deriv is None else np.asarray(ambient_normal_deriv, float)
    eye = np.eye(n)
    gauss = np.einsum("aj,ak,jl,km->ajklm", kap, kap, eye, eye) - np.einsum(
        "aj,ak,jm,kl->ajklm", kap, kap, eye, eye
    )
    Rint = Rt + gauss
    ric_b = np.einsum("ajkjk->aj", Rint)
    scalar_b = ric_b.sum(axis=1)
    nd = np.einsum("ajj->aj", Nm)
    tang_sect = np.einsum("ajkjk->aj", Rt)
    ric_amb = tang_sect + nd
    scalar_amb = tang_sect.sum(axis=1) + 2 * nd.sum(axis=1)
    ricci_tensor = np.einsum("aijik->ajk", Rint)
    return CurvatureField(
        n=n,
        weights=w,
        kappa=kap,
        scalar_boundary=scalar_b,
        scalar_ambient=scalar_amb,
        ricci_ambient_normal=nd,
        ricci_boundary=ric_b,
        ricci_ambient_tangent=ric_amb,
        covderiv_normal=np.einsum("ajj->a", Dm),
        ricci_sq=np.einsum("ajk,ajk->a", ricci_tensor, ricci_tensor),
        riemann_sq=np.einsum("aijkl,aijkl->a", Rint, Rint),
        constant_curvature=None,
        ambient_tangent=Rt,
        ambient_normal=Nm,
        ambient_normal_deriv=Dm,
        label=label,
    )


def boundary_integrate(field: CurvatureField, values) -> float:
    """Quadrature sum of nodal values against the boundary weights."""
    f = np.asarray(values, dtype=float)
    if f.ndim == 0:
        f = np.full(field.num_nodes, float(f))
    if f.shape != (field.num_nodes,):
        raise LengthMismatch(f"expected {field.num_nodes} values, got {f.shape}")
    return float(math.fsum(field.weights * f))


# --- serialization -----------------------------------------------------------


def field_columns(n: int):
    cols = ["node_index", "weight"] + [f"kappa_{j + 1}" for j in range(n)]
    cols += ["R_boundary", "R_ambient"]
    cols += [f"ricci_ambient_normal_{j + 1}" for j in range(n)]
    cols += [f"ricci_boundary_{j + 1}" for j in range(n)]
    cols += [f"ricci_ambient_tangent_{j + 1}" for j in range(n)]
    cols += ["covderiv_normal"]
    return cols


def field_to_csv(field: CurvatureField) -> str:
    n = field.n
    lines = [",".join(field_columns(n))]
    for i in range(field.num_nodes):
        row = [str(i), repr(float(field.weights[i]))]
        row += [repr(float(v)) for v in field.kappa[i]]
        row += [repr(float(field.scalar_boundary[i])), repr(float(field.scalar_ambient[i]))]
        row += [repr(float(v)) for v in field.ricci_ambient_normal[i]]
        row += [repr(float(v)) for v in field.ricci_boundary[i]]
        row += [repr(float(v)) for v in field.ricci_ambient_tangent[i]]
        row += [repr(float(field.covderiv_normal[i]))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def field_from_csv(text: str, label: str = "custom") -> CurvatureField:
    rows = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = rows[0].split(",")
    n = sum(1 for h in header if h.startswith("kappa_"))
    if header != field_columns(n):
        raise ConfigError("curvature CSV header does not match the expected columns")
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    c = 2
    kap = data[:, c : c + n]
    c += n
    rb, ra = data[:, c], data[:, c + 1]
    c += 2
    ran = data[:, c : c + n]
    c += n
    rib = data[:, c : c + n]
    c += n
    rat = data[:, c : c + n]
    c += n
    return CurvatureField(
        n=n,
        weights=data[:, 1],
        kappa=kap,
        scalar_boundary=rb,
        scalar_ambient=ra,
        ricci_ambient_normal=ran,
        ricci_boundary=rib,
        ricci_ambient_tangent=rat,
        covderiv_normal=data[:, c],
        label=label,
    )
