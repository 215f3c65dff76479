"""Trace-inequality instances on the unit disk and the unit ball in R^3.

Boundary data are band-limited: Fourier series on the circle, real spherical
harmonics on S^2. The Dirichlet energy of the harmonic extension is diagonal
in either basis, which is what makes every check here exact up to quadrature.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import roots_legendre, sph_harm_y

from ._quadrature import ball_volume
from .errors import (
    BandLimitTooLow,
    MissingEpsilon,
    NonPositiveArgument,
    UnsupportedBasis,
    UnsupportedDimension,
    UnsupportedKind,
)
from .geometry import DomainKind, DomainSpec, make_domain
from .heat_trace import model_kernel_diagonal

TOLERANCE = 1e-10


class Basis(str, enum.Enum):
    FOURIER = "Fourier"
    SPHERICAL = "RealSphericalHarmonics"


class Which(str, enum.Enum):
    SOBOLEV = "SobolevTrace"
    LOG_SOBOLEV = "LogSobolevTrace"
    NASH = "NashTrace"
    KERNEL = "KernelBound"
    RLC = "RLCCount"


# -- quadrature grids and bases --------------------------------------------


@functools.lru_cache(maxsize=32)
def sphere_grid(res: int):
    """Gauss-Legendre in cos(theta) times a uniform azimuth.

    ``res`` Legendre nodes and 2 res azimuths: exact for spherical
    polynomials of degree < 2 res. Returns (theta, phi, weights), flattened.
    """
    x, wx = roots_legendre(res)
    nphi = 2 * res
    phi = 2 * math.pi * np.arange(nphi) / nphi
    theta = np.arccos(x)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(wx, np.full(nphi, 2 * math.pi / nphi))
    return T.ravel(), P.ravel(), W.ravel()


def sh_index(l: int, m: int) -> int:
    return l * l + l + m


@functools.lru_cache(maxsize=32)
def real_sh_matrix(L: int, res: int) -> np.ndarray:
    """Real orthonormal harmonics Y_lm (l <= L) at the nodes of sphere_grid(res); shape (nodes, (L+1)^2)."""
    theta, phi, _ = sphere_grid(res)
    out = np.empty((len(theta), (L + 1) ** 2))
    for l in range(L + 1):
        for m in range(0, l + 1):
            y = sph_harm_y(l, m, theta, phi)
            if m == 0:
                out[:, sh_index(l, 0)] = y.real
            else:
                s = math.sqrt(2) * (-1) ** m
                out[:, sh_index(l, m)] = s * y.real
                out[:, sh_index(l, -m)] = s * y.imag
    out.flags.writeable = False
    return out


def circle_grid(res: int):
    theta = 2 * math.pi * np.arange(res) / res
    return theta, np.full(res, 2 * math.pi / res)


@dataclass(frozen=True)
class BoundaryFunction:
    """Band-limited data on the unit circle or the unit sphere S^2.

    Fourier layout: [a_0, a_1, b_1, ..., a_L, b_L] for a_0 + sum a_k cos + b_k sin.
    Spherical layout: index l^2 + l + m over real orthonormal Y_lm.
    The default ``grid_res`` integrates f^4 exactly.
    """

    basis: Basis
    coefficients: np.ndarray
    band_limit: int
    grid_res: Optional[int] = None

    def __post_init__(self):
        basis = Basis(self.basis)
        object.__setattr__(self, "basis", basis)
        c = np.asarray(self.coefficients, dtype=float)
        L = int(self.band_limit)
        expected = 2 * L + 1 if basis == Basis.FOURIER else (L + 1) ** 2
        if c.shape != (expected,):
            raise ValueError(f"{basis.value} band limit {L} needs {expected} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        # circle: 4L + 4 equispaced points; sphere: 2L + 2 Legendre rows
        floor = 4 * L + 4 if basis == Basis.FOURIER else 2 * L + 2
        res = floor if self.grid_res is None else int(self.grid_res)
        if res < floor:
            raise ValueError(f"grid resolution {res} too coarse for band limit {L}")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "grid_res", res)

    @classmethod
    def constant(cls, basis, value: float, band_limit: int = 0) -> "BoundaryFunction":
        basis = Basis(basis)
        size = 2 * band_limit + 1 if basis == Basis.FOURIER else (band_limit + 1) ** 2
        c = np.zeros(size)
        # the constant mode is 1 for Fourier and 1/sqrt(4 pi) for Y_00
        c[0] = value if basis == Basis.FOURIER else value * math.sqrt(4 * math.pi)
        return cls(basis, c, band_limit)

    def nodes(self):
        """(values, weights) on the quadrature grid."""
        if self.basis == Basis.FOURIER:
            theta, w = circle_grid(self.grid_res)
            k = np.arange(1, self.band_limit + 1)
            a = self.coefficients[1::2]
            b = self.coefficients[2::2]
            vals = self.coefficients[0] + np.cos(np.outer(theta, k)) @ a + np.sin(np.outer(theta, k)) @ b
            return vals, w
        Y = real_sh_matrix(self.band_limit, self.grid_res)
        return Y @ self.coefficients, sphere_grid(self.grid_res)[2]

    def degrees(self) -> np.ndarray:
        L = self.band_limit
        if self.basis == Basis.FOURIER:
            return np.concatenate([[0], np.repeat(np.arange(1, L + 1), 2)])
        return np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])

    def scaled(self, s: float) -> "BoundaryFunction":
        return BoundaryFunction(self.basis, s * self.coefficients, self.band_limit, self.grid_res)


def extension_energy(f: BoundaryFunction) -> float:
    """Dirichlet energy of the harmonic extension into the unit disk or unit ball.

    Circle: r^k cos k theta has energy pi k, so E = pi sum k (a_k^2 + b_k^2).
    Sphere: r^l Y_lm has energy l.
    """
    if not isinstance(f, BoundaryFunction):
        raise UnsupportedBasis("expected a BoundaryFunction")
    k = f.degrees().astype(float)
    c2 = f.coefficients**2
    if f.basis == Basis.FOURIER:
        return float(math.pi * np.dot(k, c2))
    if f.basis == Basis.SPHERICAL:
        return float(np.dot(k, c2))
    raise UnsupportedBasis(f"unknown basis {f.basis}")


# -- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    which: Which
    constants: dict
    lhs: float
    rhs: float
    margin: float
    holds: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "which": Which(self.which).value,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "holds": bool(self.holds),
            "witness": self.witness,
        }
        return json.dumps(doc, sort_keys=True)


def make_report(which, constants, lhs, rhs, witness=None) -> InequalityReport:
    margin = float(rhs - lhs)
    holds = bool(margin >= -TOLERANCE * abs(rhs))
    return InequalityReport(Which(which), dict(constants), float(lhs), float(rhs), margin, holds, witness or {})


def reports_to_jsonl(reports) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def reports_from_jsonl(text: str) -> list:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        out.append(
            InequalityReport(Which(d["which"]), d["constants"], d["lhs"], d["rhs"], d["margin"], d["holds"], d["witness"])
        )
    return out


# -- the inequalities --------------------------------------------------------


def sharp_trace_constant(n: int) -> float:
    """Sharp Sobolev-trace constant 2 (n-1)^-1 ((n+1) omega_(n+1))^(-1/n)."""
    if n < 2:
        raise UnsupportedDimension("needs n >= 2")
    return 2 / (n - 1) * ((n + 1) * ball_volume(n + 1)) ** (-1 / n)


def log_sobolev_beta(n: int, A: float, B: float, eps: float) -> float:
    return n / 2 * math.log(n * A / (2 * math.e)) + B / A * eps - n / 2 * math.log(eps)


def _norms(f: BoundaryFunction):
    vals, w = f.nodes()
    a = np.abs(vals)
    l1 = float(np.dot(w, a))
    l2sq = float(np.dot(w, vals * vals))
    l4 = float(np.dot(w, vals**4))
    with np.errstate(divide="ignore", invalid="ignore"):
        vlog = np.where(a > 0, vals * vals * np.log(np.where(a > 0, a, 1.0)), 0.0)
    return l1, l2sq, l4, float(np.dot(w, vlog))


def functional_inequality_check(which, f: BoundaryFunction, A: float, B: float, eps: Optional[float] = None) -> InequalityReport:
    """One instance of the Sobolev, log-Sobolev or Nash trace inequality on S^2.

    The interior energy is that of the harmonic extension, which minimizes
    the Dirichlet integral among extensions of the same trace.
    """
    which = Which(which)
    if f.basis != Basis.SPHERICAL:
        raise UnsupportedDimension("trace inequalities are checked for n = 2 (data on S^2)")
    if A <= 0 or B <= 0:
        raise NonPositiveArgument("A and B must be positive")
    n = 2
    energy = extension_energy(f)
    l1, l2sq, l4, vlogv = _norms(f)
    consts = {"A": A, "B": B}
    if which == Which.SOBOLEV:
        lhs = l4 ** ((n - 1) / n)
        rhs = A * energy + B * l2sq
    elif which == Which.LOG_SOBOLEV:
        if eps is None:
            raise MissingEpsilon("LogSobolevTrace needs eps")
        if eps <= 0:
            raise NonPositiveArgument("eps must be positive")
        beta = log_sobolev_beta(n, A, B, eps)
        consts.update(eps=eps, beta=beta)
        lhs = vlogv
        rhs = eps * energy + beta * l2sq + (0.5 * l2sq * math.log(l2sq) if l2sq > 0 else 0.0)
    elif which == Which.NASH:
        lhs = l2sq ** (1 + 1 / n)
        rhs = (A * energy + B * l2sq) * l1 ** (2 / n)
    else:
        raise ValueError(f"{which.value} is not a functional inequality")
    return make_report(which, consts, lhs, rhs, {"energy": energy, "band_limit": f.band_limit})


def random_sphere_function(seed: int, index: int, band_limit: int = 32, scale: float = 1.0) -> BoundaryFunction:
    """Gaussian coefficients with variance max(l, 1)^-4, seeded per (seed, index)."""
    rng = np.random.default_rng([seed, index])
    deg = np.concatenate([np.full(2 * l + 1, l) for l in range(band_limit + 1)])
    sd = np.maximum(deg, 1).astype(float) ** -2
    return BoundaryFunction(Basis.SPHERICAL, scale * sd * rng.standard_normal(len(deg)), band_limit)


@dataclass(frozen=True)
class Calibration:
    A: float
    B: float
    raw_max: float
    samples: int
    seed: int
    band_limit: int
    safety: float


def calibrate_B(A: Optional[float] = None, samples: int = 10_000, seed: int = 0, band_limit: int = 32, safety: float = 1.5, batch: int = 500) -> Calibration:
    """B = safety * max over random data of (Sobolev lhs - A energy) / ||v||^2 on S^2."""
    if A is None:
        A = sharp_trace_constant(2)
    res = 2 * band_limit + 2
    Y = real_sh_matrix(band_limit, res)
    w = sphere_grid(res)[2]
    deg = np.concatenate([np.full(2 * l + 1, l) for l in range(band_limit + 1)]).astype(float)
    best = -math.inf
    for start in range(0, samples, batch):
        idx = range(start, min(start + batch, samples))
        C = np.stack([random_sphere_function(seed, i, band_limit).coefficients for i in idx])
        V = C @ Y.T
        l4 = (V**4) @ w
        l2 = (V * V) @ w
        energy = (C * C) @ deg
        best = max(best, float(np.max((np.sqrt(l4) - A * energy) / l2)))
    return Calibration(A, safety * best, best, samples, seed, band_limit, safety)


def kernel_bound_check(spec: DomainSpec, A: float, B: float, t_grid) -> InequalityReport:
    """K(t, x, x) <= (n A e / 4)^n exp(B t / A) / t^n on every grid t; reports the worst t."""
    spec = make_domain(spec)
    if not (spec.kind == DomainKind.BALL and spec.n == 2):
        raise UnsupportedKind("kernel bound is checked on Ball n=2 only")
    n = 2
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0):
        raise NonPositiveArgument("t must be positive")
    lhs = np.array([model_kernel_diagonal(spec, float(s)) for s in t])
    rhs = (n * A * math.e / 4) ** n * np.exp(B / A * t) / t**n
    rel = (rhs - lhs) / np.abs(rhs)
    i = int(np.argmin(rel))
    return make_report(
        Which.KERNEL,
        {"A": A, "B": B},
        lhs[i],
        rhs[i],
        {"t": float(t[i]), "grid_size": int(len(t)), "violations": int(np.sum(rel < -TOLERANCE))},
    )


def _rlc_count_at(qf: BoundaryFunction, A: float, B: float, L: int) -> int:
    # exact Galerkin entries: integrand degree 2L + Lq
    res = L + (qf.band_limit + 1) // 2 + 2
    Y = real_sh_matrix(L, res)
    w = sphere_grid(res)[2]
    qv = real_sh_matrix(qf.band_limit, res) @ qf.coefficients
    G = Y.T @ ((w * qv)[:, None] * Y)
    deg = np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)]).astype(float)
    H = np.diag(A * deg + B) + G
    ev = np.linalg.eigvalsh((H + H.T) / 2)
    scale = max(1.0, float(np.max(np.abs(ev))))
    return int(np.sum(ev <= 1e-12 * scale))


def rlc_count(q: BoundaryFunction, A: float, B: float, L: Optional[int] = None) -> InequalityReport:
    """Number of non-positive levels of A N + B + q against e^2 * integral q_-^2 on S^2.

    Levels are eigenvalues of the Galerkin matrix A diag(l) + B + G_q over
    harmonics of degree <= L; the count must not change at L + 4. The
    default L clears sup|q| / A, beyond which no level can cross zero.
    """
    if q.basis != Basis.SPHERICAL:
        raise UnsupportedBasis("q must live on S^2")
    if L is None:
        sup = float(np.max(np.abs(BoundaryFunction(q.basis, q.coefficients, q.band_limit, 64).nodes()[0])))
        L = max(8, int(math.ceil(sup / A)) + 4)
    n = 2
    c1 = _rlc_count_at(q, A, B, L)
    c2 = _rlc_count_at(q, A, B, L + 4)
    if c1 != c2:
        raise BandLimitTooLow(f"count {c1} at L = {L} but {c2} at L = {L + 4}")
    vals, w = BoundaryFunction(q.basis, q.coefficients, q.band_limit, max(q.grid_res, 64)).nodes()
    bound = math.e**n * float(np.dot(w, np.maximum(-vals, 0.0) ** n))
    return make_report(Which.RLC, {"A": A, "B": B, "C": math.e**n}, c1, bound, {"L": L, "count_L_plus_4": c2})


def random_negative_potential(seed: int, index: int, band_limit: int = 4, depth: float = 1.0) -> BoundaryFunction:
    """A band-limited q < 0: random harmonics shifted below zero, then by ``depth`` times their range."""
    g = random_sphere_function(seed, index, band_limit)
    vals, _ = BoundaryFunction(g.basis, g.coefficients, band_limit, 64).nodes()
    c = g.coefficients.copy()
    shift = float(np.max(vals)) + 0.1 + depth * float(np.ptp(vals))
    c[0] -= shift * math.sqrt(4 * math.pi)
    return BoundaryFunction(Basis.SPHERICAL, c, band_limit)
