"""Small-time heat coefficients of the DtN map and related curvature integrals.

Densities a_0..a_3 are written in principal-curvature coordinates. All
ambient quantities carry a tilde in the comments (R~); ``N`` is the matrix
R~_{j(n+1)k(n+1)} and ``D`` its covariant derivative in the normal direction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gamma as _gamma

from ._quadrature import laguerre_rule, sphere_rule, sphere_volume
from .errors import (
    DTermUnavailable,
    OrderNotValidForDimension,
    PatternDimensionMismatch,
    QuadratureNotConverged,
)
from .geometry import CurvatureField, boundary_integrate, principal_q1, principal_q2, principal_q3


def gamma(x: float) -> float:
    """Gamma function; inf at the poles so that 0 * pole can be detected."""
    if x <= 0 and float(x).is_integer():
        return math.inf
    return float(_gamma(x))


# --- symbol point ----------------------------------------------------------------


@dataclass(frozen=True)
class SymbolPoint:
    """Curvature data at one boundary point in principal coordinates."""

    kappa: np.ndarray
    ambient_normal: Optional[np.ndarray] = None
    ambient_normal_deriv: Optional[np.ndarray] = None
    ambient_tangent: Optional[np.ndarray] = None

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.kappa, dtype=float))
        n = len(k)
        object.__setattr__(self, "kappa", k)
        defaults = {
            "ambient_normal": (n, n),
            "ambient_normal_deriv": (n, n),
            "ambient_tangent": (n, n, n, n),
        }
        for name, shape in defaults.items():
            v = getattr(self, name)
            v = np.zeros(shape) if v is None else np.asarray(v, dtype=float)
            if v.shape != shape or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be finite with shape {shape}")
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return len(self.kappa)

    @property
    def intrinsic(self) -> np.ndarray:
        """R_jklm = R~_jklm + kappa_j kappa_k (d_jl d_km - d_jm d_kl)."""
        k, e = self.kappa, np.eye(self.n)
        kk = np.outer(k, k)
        gauss = np.einsum("jk,jl,km->jklm", kk, e, e) - np.einsum("jk,jm,kl->jklm", kk, e, e)
        return self.ambient_tangent + gauss

    @property
    def scalar_boundary(self) -> float:
        return float(np.einsum("jkjk->", self.intrinsic))

    @property
    def ricci_boundary(self) -> np.ndarray:
        return np.einsum("jkjk->j", self.intrinsic)

    @property
    def ricci_ambient_tangent(self) -> np.ndarray:
        """R~_jj = sum_k R~_jkjk + R~_{j(n+1)j(n+1)}."""
        return np.einsum("jkjk->j", self.ambient_tangent) + np.diag(self.ambient_normal)

    @property
    def scalar_ambient(self) -> float:
        return float(np.einsum("jkjk->", self.ambient_tangent) + 2 * np.trace(self.ambient_normal))

    @property
    def covderiv_normal(self) -> float:
        return float(np.trace(self.ambient_normal_deriv))

    @property
    def q1(self) -> float:
        return float(principal_q1(self.kappa))

    @property
    def q2(self) -> float:
        return float(principal_q2(self.kappa))

    @property
    def q3(self) -> float:
        return float(principal_q3(self.kappa, np.diag(self.ambient_normal)))

    @classmethod
    def from_field(cls, fld: CurvatureField, i: int) -> "SymbolPoint":
        """Node i of a field. Without stored tensors, diagonal data is rebuilt.

        The tangential ambient tensor is then taken of Kulkarni-Nomizu form
        S o g with S diagonal, chosen to reproduce the stored Ricci entries;
        only those entries enter the coefficient densities.
        """
        n = fld.n
        if fld.ambient_tangent is not None:
            return cls(
                fld.kappa[i], fld.ambient_normal[i], fld.ambient_normal_deriv[i], fld.ambient_tangent[i]
            )
        nd = fld.ricci_ambient_normal[i]
        tang_ric = fld.ricci_ambient_tangent[i] - nd
        Rt = np.zeros((n, n, n, n))
        if np.any(tang_ric != 0):
            if n < 3:
                raise ValueError("cannot rebuild a tangential ambient tensor for n < 3")
            # sum_k R~_jkjk = (n-2) S_jj + tr S
            tr = tang_ric.sum() / (2 * n - 2)
            s = (tang_ric - tr) / (n - 2)
            S, e = np.diag(s), np.eye(n)
            Rt = (
                np.einsum("ik,jl->ijkl", S, e)
                + np.einsum("jl,ik->ijkl", S, e)
                - np.einsum("il,jk->ijkl", S, e)
                - np.einsum("jk,il->ijkl", S, e)
            )
        D = np.zeros((n, n))
        np.fill_diagonal(D, fld.covderiv_normal[i] / n)
        return cls(fld.kappa[i], np.diag(nd), D, Rt)


# --- closed-form densities -------------------------------------------------------


def _ratio(a, b):
    return a / b


def levi_part(n: int, scalar_boundary):
    """Gamma((n-1)/2) R / (24 pi^((n+1)/2)): the part of a_2 from the parametrix."""
    return gamma((n - 1) / 2) * np.asarray(scalar_boundary) / (24 * math.pi ** ((n + 1) / 2))


def _density_arrays(n, m, kappa, Rbd, RtO, ric_b, ric_t, covD):
    """a_m on arrays of nodes; kappa has shape (..., n)."""
    if m not in (0, 1, 2, 3):
        raise OrderNotValidForDimension(f"order {m} not implemented")
    if n < max(1, m):
        raise OrderNotValidForDimension(f"a_{m} requires n >= {max(1, m)}, got n = {n}")
    kappa = np.asarray(kappa, dtype=float)
    shape = kappa.shape[:-1]
    vol = sphere_volume(n)
    c = (1 / (2 * math.pi)) ** n
    sk = kappa.sum(axis=-1)
    if m == 0:
        return np.full(shape, gamma((n + 1) / 2) / math.pi ** ((n + 1) / 2))
    if m == 1:
        return c * (n - 1) * gamma(n) * vol / (2 * n) * sk
    sk2 = (kappa**2).sum(axis=-1)
    if m == 2:
        bracket = (
            _ratio(3 - n, 3 * n) * Rbd
            + _ratio(n - 1, n) * RtO
            + _ratio(n**3 - n**2 - 4 * n + 6, n * (n + 2)) * sk**2
            + _ratio(n**2 - n - 2, n * (n + 2)) * sk2
        )
        return gamma(n - 1) * vol / (8 * (2 * math.pi) ** n) * bracket
    sk3 = (kappa**3).sum(axis=-1)
    k_rt = (kappa * ric_t).sum(axis=-1)
    k_rb = (kappa * ric_b).sum(axis=-1)
    P = (n + 2) * (n + 4)
    bracket = (
        _ratio(n**3 - 2 * n**2 - 7 * n + 7, 2 * (n + 2)) * RtO * sk
        + _ratio(-3 * n**4 - 4 * n**3 + 59 * n**2 + 75 * n - 180, 6 * P) * sk * Rbd
        + _ratio(n**5 - 20 * n**3 + 2 * n**2 + 61 * n - 74, 6 * P) * sk**3
        + _ratio(n**4 + 8 * n**3 + 15 * n**2 + 3 * n - 32, 2 * P) * sk * sk2
        + _ratio(-6 * n**3 - 34 * n**2 + 40, 3 * P) * sk3
        + _ratio(4 * n**2 - 6, n + 2) * k_rt
        - _ratio(12 * n**3 + 50 * n**2 - 6 * n - 104, 3 * P) * k_rb
        + (n - 1) * covD
        - _ratio(n - 2, 2) * RtO
        + _ratio(n - 2, 2) * Rbd
        - _ratio(n - 2, 2) * sk2
    )
    return c * gamma(n - 2) * vol / (8 * n) * bracket


def coefficient_density(point: SymbolPoint, m: int) -> float:
    """Heat-coefficient density a_m(n, x) at a single point, transcribed literally."""
    return float(
        _density_arrays(
            point.n,
            m,
            point.kappa,
            point.scalar_boundary,
            point.scalar_ambient,
            point.ricci_boundary,
            point.ricci_ambient_tangent,
            point.covderiv_normal,
        )
    )


def a2_tilde(point: SymbolPoint) -> float:
    """a_2 minus its parametrix part, written with sum_j R~_{j(n+1)j(n+1)}."""
    n = point.n
    if n < 2:
        raise OrderNotValidForDimension("a_2 requires n >= 2")
    k = point.kappa
    sk, sk2 = k.sum(), (k**2).sum()
    sumN = np.trace(point.ambient_normal)
    bracket = (
        (n**3 - 2 * n**2 - 5 * n + 8) / (n * (n + 2)) * sk**2
        + 2 * (n - 1) / n * sumN
        + (2 * n**2 - 4) / (n * (n + 2)) * sk2
    )
    return (1 / (2 * math.pi)) ** n * gamma(n - 1) * sphere_volume(n) / 8 * bracket


def field_densities(fld: CurvatureField, m: int) -> np.ndarray:
    return _density_arrays(
        fld.n,
        m,
        fld.kappa,
        fld.scalar_boundary,
        fld.scalar_ambient,
        fld.ricci_boundary,
        fld.ricci_ambient_tangent,
        fld.covderiv_normal,
    )


@dataclass(frozen=True)
class CoefficientSet:
    n: int
    densities: dict
    integrals: dict
    valid_orders: tuple

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "integrals": {f"a{m}": self.integrals[m] for m in self.valid_orders},
            "valid_orders": list(self.valid_orders),
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    def densities_csv(self) -> str:
        orders = self.valid_orders
        lines = ["node_index," + ",".join(f"a{m}" for m in orders)]
        size = len(self.densities[orders[0]])
        for i in range(size):
            lines.append(f"{i}," + ",".join(repr(float(self.densities[m][i])) for m in orders))
        return "\n".join(lines) + "\n"


def integrated_coefficients(fld: CurvatureField) -> CoefficientSet:
    """Nodewise densities and boundary integrals for every valid order."""
    orders = tuple(m for m in range(4) if fld.n >= max(1, m))
    dens, ints = {}, {}
    for m in orders:
        d = np.broadcast_to(field_densities(fld, m), (fld.num_nodes,)).copy()
        dens[m] = d
        ints[m] = boundary_integrate(fld, d)
    return CoefficientSet(fld.n, dens, ints, orders)


# --- moment table ----------------------------------------------------------------

_EVEN_ROWS = {
    (): (1, 1),
    (2,): (1, 1),
    (4,): (3, 2),
    (2, 2): (1, 2),
    (6,): (15, 3),
    (4, 2): (3, 3),
    (2, 2, 2): (1, 3),
}


def moment_integral(n: int, m: int, pattern=()) -> float:
    """Integral over R^n of |xi|^(m - |alpha|) xi^alpha exp(-|xi|).

    ``pattern`` lists the exponents of distinct coordinates, e.g. (2, 2) for
    xi_k^2 xi_l^2 with k != l. The result is Gamma(n+m) vol(S^(n-1)) times
    the tabulated angular factor; patterns with an odd exponent give 0.
    """
    pat = tuple(sorted((int(a) for a in pattern if int(a) != 0), reverse=True))
    if any(a < 0 for a in pat):
        raise PatternDimensionMismatch("exponents must be nonnegative")
    if len(pat) > n:
        raise PatternDimensionMismatch(f"pattern {pat} needs {len(pat)} distinct axes, n = {n}")
    if n + m <= 0:
        raise PatternDimensionMismatch("radial integral diverges for n + m <= 0")
    if sum(pat) > 6:
        raise PatternDimensionMismatch(f"pattern {pat} is not in the moment table")
    if any(a % 2 for a in pat):
        return 0.0
    if pat not in _EVEN_ROWS:
        raise PatternDimensionMismatch(f"pattern {pat} is not in the moment table")
    num, depth = _EVEN_ROWS[pat]
    den = 1.0
    for i in range(depth if pat else 0):
        den *= n + 2 * i
    return num * gamma(n + m) * sphere_volume(n) / den


# --- normal-coordinate symbols on the unit sphere -------------------------------


def _symbols(point: SymbolPoint, w: np.ndarray):
    """Angular parts of p0B, p-1B, p-2B and p-1 at unit vectors w (rows).

    The radial factors |xi|^0, |xi|^-1, |xi|^-2, |xi|^-1 are applied by the
    caller. p_0 of the intrinsic operator vanishes.
    """
    k = point.kappa
    A = np.diag(k)
    N = point.ambient_normal
    D = point.ambient_normal_deriv
    R = point.intrinsic
    trA, trA2 = k.sum(), (k**2).sum()
    Q1, Q2, Q3 = point.q1, point.q2, point.q3
    sumN = np.trace(N)
    Aw = w**2 @ k
    quadNA = np.einsum("pi,ij,pj->p", w, 2 * N + 6 * A @ A, w)
    NA = N @ A
    quadD = np.einsum("pi,ij,pj->p", w, 2 * D + 20 * NA + 24 * A @ A @ A, w)
    E = 2 * Q1 - 2 * sumN + 2 * trA2
    p0B = 0.5 * (trA - Aw)
    pm1B = (-2 * Q1 + 2 * sumN - 2 * trA2 + 3 * trA**2 + 5 * Aw**2 - quadNA) / 8
    # the index in "sum_j (-2 D_jj + 4 N_lj A_lj)" is read with l summed
    lin = np.trace(-2 * D) + 4 * np.sum(N * A)
    X = 0.5 * quadNA - 2 * Aw**2 + 2 * trA**2 - 0.5 * E
    pm2B = (Aw / 8) * (2 * Q1 - 2 * sumN + 2 * trA2 - 3 * trA**2 - 5 * Aw**2 + quadNA) - 0.25 * (
        1.5 * trA * E
        - 4 * trA**3
        + 0.25 * (6 * Q2 + 3 * Q3 + lin)
        - 0.5 * (Aw + trA) * X
        + 0.25 * quadD
        - 1.5 * Aw * quadNA
        + 4 * Aw**3
        + 0.5 * trA * X
        - 0.25 * (Aw + trA) * (E - 4 * trA**2)
    )
    ric_like = np.einsum("jklk->jl", R)
    sym4 = R + np.einsum("jmkl->jlkm", R)  # R_jmkl + R_jlkm, indexed [j,m,k,l]
    quad = np.einsum("pj,jl,pl->p", w, ric_like, w) / 3
    quart = np.einsum("pj,pk,pl,pm,jmkl->p", w, w, w, w, sym4) / 3
    pm1 = 0.25 * (quad + quart)
    return p0B, pm1B, pm2B, pm1


def _level_terms(level, t, p0B, pm1B, pm2B, pm1):
    """(t-power coefficient, radial degree) pieces of the level integrand."""
    if level == 2:
        return [(t * p0B, 0)]
    if level == 3:
        return [(t * pm1B, -1), (t * t / 2 * p0B**2, 0)]
    if level == 4:
        return [(t * pm2B, -2), (t * t * p0B * (pm1 + pm1B), -1), (t**3 / 6 * p0B**3, 0)]
    raise ValueError("level must be 2, 3 or 4")


def _oracle_once(point, level, t, radial_order, angular_order):
    n = point.n
    s, ws = laguerre_rule(radial_order)
    r = s / t
    if n == 1:
        w, wa = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    else:
        w, wa = sphere_rule(n, angular_order)
    sym = _symbols(point, w)
    total, scale = 0.0, 0.0
    for ang, deg in _level_terms(level, t, *sym):
        ang = np.broadcast_to(ang, wa.shape)
        radial = np.sum(ws * r ** (n - 1 + deg)) / t
        total += radial * np.sum(wa * ang)
        scale += abs(radial) * np.sum(wa * np.abs(ang))
    c = (1 / (2 * math.pi)) ** n
    return c * total, c * scale


def symbol_diagonal_oracle(point: SymbolPoint, level: int, t: float, tol: float = 1e-8) -> float:
    """Brute-force xi-integral of the diagonal kernel contribution at this level.

    Integrates over R^n in spherical coordinates: Gauss-Laguerre in |xi|
    against exp(-t|xi|) and a product rule on S^(n-1). The rule is doubled
    once and the two results must agree to ``tol`` relative to the size of the
    integrand. The value scales as t^(level - 1 - n).
    """
    if not t > 0:
        raise ValueError("t must be positive")
    n = point.n
    if n < level - 1:
        raise OrderNotValidForDimension(f"level {level} requires n >= {level - 1}")
    v1, s1 = _oracle_once(point, level, t, 24, 8)
    v2, s2 = _oracle_once(point, level, t, 48, 16)
    err = abs(v2 - v1)
    if err > tol * max(abs(v2), 1e-300) and err > 1e-13 * max(s2, 1e-300):
        raise QuadratureNotConverged(f"level {level} quadrature changed by {err:.2e}")
    return v2


def transcription_check(point: SymbolPoint, level: int, t: float = 1.0):
    """(oracle, closed-form target) at one point.

    Level 2 targets t^(1-n) a_1, level 3 the non-parametrix part of a_2 and
    level 4 the literal a_3.
    """
    n = point.n
    oracle = symbol_diagonal_oracle(point, level, t)
    if level == 2:
        target = t ** (1 - n) * coefficient_density(point, 1)
    elif level == 3:
        target = t ** (2 - n) * a2_tilde(point)
    else:
        target = t ** (3 - n) * coefficient_density(point, 3)
    return oracle, target


def random_symbol_point(n: int, rng: np.random.Generator, ambient: bool = True) -> SymbolPoint:
    """Random principal curvatures with ambient entries of Riemann type."""
    k = rng.normal(size=n)
    if not ambient:
        return SymbolPoint(k)
    S = rng.normal(size=(n, n))
    S = 0.5 * (S + S.T)
    e = np.eye(n)
    Rt = (
        np.einsum("ik,jl->ijkl", S, e)
        + np.einsum("jl,ik->ijkl", S, e)
        - np.einsum("il,jk->ijkl", S, e)
        - np.einsum("jk,il->ijkl", S, e)
    )
    N = rng.normal(size=(n, n))
    D = rng.normal(size=(n, n))
    return SymbolPoint(k, 0.5 * (N + N.T), 0.5 * (D + D.T), Rt)


def b4_comparison_report(num_nodes: int = 16) -> dict:
    """Literal a_3 on the unit 3-sphere against the exact ball trace constant.

    The trace of the unit ball in R^4 is (1 + x)/(1 - x)^3 with x = e^-t,
    whose t^0 coefficient is 1/3. The level-4 symbol integral is listed too.
    Agreement is not expected; this is a report, not a check.
    """
    from .geometry import DomainKind, DomainSpec, curvature_field

    fld = curvature_field(DomainSpec(DomainKind.BALL, 3), num_nodes)
    literal = integrated_coefficients(fld).integrals[3]
    point = SymbolPoint.from_field(fld, 0)
    oracle = symbol_diagonal_oracle(point, 4, 1.0) * float(np.sum(fld.weights))
    exact = 1.0 / 3.0
    return {
        "domain": "unit ball in R^4 (boundary S^3)",
        "literal_a3_integral": literal,
        "symbol_oracle_level4_integral": oracle,
        "exact_trace_constant": exact,
        "literal_minus_exact": literal - exact,
        "oracle_minus_exact": oracle - exact,
        "gating": False,
    }


# --- fractional Laplacian on the boundary ---------------------------------------


def _riemann_constant(n, K):
    e = np.eye(n)
    return K * (np.einsum("ik,jl->ijkl", e, e) - np.einsum("il,jk->ijkl", e, e))


def cubic_invariant(R: np.ndarray) -> float:
    """Non-derivative part of the order-t^3 heat invariant, indices taken literally."""
    e = np.einsum
    t = e("ijij->", R)
    return float(
        -35 / 9 * t**3
        + 14 / 3 * t * e("mlmp,qlqp->", R, R)
        - 14 / 3 * t * e("mlpq,mlpq->", R, R)
        + 4 * e("ijik,jlml,kpmp->", R, R, R)
        - 20 / 9 * e("ijik,lpmp,jlkm->", R, R, R)
        + 8 / 9 * e("ijik,jlmp,klmp->", R, R, R)
        - 8 / 3 * e("ijkl,ijmp,klmp->", R, R, R)
    )


def _coef(g, integral, denom):
    if integral == 0:
        return 0.0
    if math.isinf(g):
        return math.nan
    return g * integral / denom


@dataclass(frozen=True)
class FractionalCoefficients:
    """Coefficients of t^(-n), t^(2-n), t^(4-n) [, t^(6-n)] in the trace of
    exp(-t sqrt(-Delta)) on the boundary.

    ``literal`` uses R = full scalar curvature, A = R^2, C = |Riem|^2 and
    the 1/720 prefactor. ``consistent`` uses the reading that agrees with the
    heat expansion it is derived from: R = sum_{i<j} R_ijij (half the scalar),
    C = |Riem|^2 / 2, the 1/2880 prefactor and a D term without the extra
    (4 pi)^(-n/2). NaN marks a Gamma-function pole (a log term appears).
    """

    n: int
    powers: tuple
    literal: tuple
    consistent: tuple
    d_available: bool
    euler: dict = field(default_factory=dict)


def fractional_coefficients(fld: CurvatureField, include_d: bool = True) -> FractionalCoefficients:
    n = fld.n
    if fld.ricci_sq is None or fld.riemann_sq is None:
        raise DTermUnavailable("field lacks intrinsic curvature norms")
    pf = math.pi ** ((n + 1) / 2)
    vol = float(np.sum(fld.weights))
    intR = boundary_integrate(fld, fld.scalar_boundary)
    intA = boundary_integrate(fld, fld.scalar_boundary**2)
    intB = boundary_integrate(fld, fld.ricci_sq)
    intC = boundary_integrate(fld, fld.riemann_sq)
    c0 = gamma((n + 1) / 2) / pf * vol
    literal = [
        c0,
        _coef(gamma((n - 1) / 2), intR, 12 * pf),
        _coef(gamma((n - 3) / 2), 10 * intA - intB + 2 * intC, 720 * pf),
    ]
    consistent = [
        c0,
        _coef(gamma((n - 1) / 2), intR, 24 * pf),
        _coef(gamma((n - 3) / 2), 2.5 * intA - intB + intC, 2880 * pf),
    ]
    powers = [-n, 2 - n, 4 - n]
    d_ok = fld.constant_curvature is not None
    if include_d:
        if not d_ok:
            raise DTermUnavailable("D term needs a flat or constant-curvature boundary")
        K = fld.constant_curvature
        g5 = gamma((n - 5) / 2)
        cub = cubic_invariant(_riemann_constant(n, K)) if n >= 2 else 0.0
        cub_gilkey = cubic_invariant(_riemann_constant(n, -K)) if n >= 2 else 0.0
        d_literal = (4 * math.pi) ** (-n / 2) / math.factorial(7) * cub * vol
        d_consistent = cub_gilkey * vol / math.factorial(7)
        literal.append(_coef(g5, d_literal, 64 * pf))
        consistent.append(_coef(g5, d_consistent, 64 * pf))
        powers.append(6 - n)
    euler = {}
    if n == 2:
        euler = {
            "E_literal": intR / (2 * math.pi),
            "chi_gauss_bonnet": intR / (4 * math.pi),
        }
    return FractionalCoefficients(n, tuple(powers), tuple(literal), tuple(consistent), d_ok, euler)
