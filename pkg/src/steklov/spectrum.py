"""Steklov spectra: closed forms and a numerical DtN eigensolver.

Sign convention: the stored eigenvalues are those of the nonnegative
Dirichlet-to-Neumann map Lambda f = du/dn (outward normal, u harmonic with
u = f on the boundary). With the inward normal nu one has du/dnu = -lambda u,
so Lambda = -N_g. This is the only place the flip is spelled out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from ._quadrature import ball_volume
from .errors import ConfigError, IllConditioned, NotConverged, UnsupportedKind
from .geometry import DomainKind, DomainSpec, make_domain, star_boundary

CLOSED_FORM = "ClosedForm"
NUMERIC = "Numeric"
LAPLACE = "laplace"


@dataclass(frozen=True)
class Spectrum:
    """Distinct sorted eigenvalues with multiplicities."""

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    n: int
    vol: Optional[float]
    source: str = CLOSED_FORM
    accuracy: float = 0.0
    label: str = ""

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        mu = np.asarray(self.multiplicities, dtype=np.int64)
        if ev.shape != mu.shape:
            raise ValueError("eigenvalues and multiplicities differ in length")
        if not np.all(np.isfinite(ev)) or np.any(ev < 0):
            raise ValueError("eigenvalues must be finite and nonnegative")
        if np.any(np.diff(ev) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        if np.any(mu <= 0):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "multiplicities", mu)

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(self.eigenvalues, self.multiplicities)

    def counting(self, tau: float) -> int:
        """N(tau) = number of eigenvalues <= tau, with multiplicity."""
        return int(self.multiplicities[self.eigenvalues <= tau].sum())


def _truncate(values, mults, K):
    """Keep the first K eigenvalues counted with multiplicity."""
    order = np.argsort(values, kind="stable")
    values, mults = np.asarray(values)[order], np.asarray(mults)[order]
    csum = np.cumsum(mults)
    last = int(np.searchsorted(csum, K))
    if last >= len(values):
        raise ValueError("not enough levels generated")
    mults = mults[: last + 1].copy()
    mults[-1] -= csum[last] - K
    return values[: last + 1], mults


def group_eigenvalues(values, rel_tol: float = 1e-6, abs_tol: float = 1e-10):
    """Cluster sorted eigenvalues into (value, multiplicity) pairs.

    Consecutive values join a cluster when their gap is below rel_tol times
    the cluster magnitude (or abs_tol near zero). The cluster value is the mean.
    """
    v = np.sort(np.asarray(values, dtype=float))
    groups = []
    start = 0
    for i in range(1, len(v) + 1):
        if i == len(v) or v[i] - v[start] > max(rel_tol * abs(v[i]), abs_tol):
            groups.append((float(np.mean(v[start:i])), i - start))
            start = i
    vals = np.array([g[0] for g in groups])
    mults = np.array([g[1] for g in groups], dtype=np.int64)
    return vals, mults


def ball_multiplicity(n: int, l: int) -> int:
    """Dimension of degree-l spherical harmonics on S^n."""
    c = math.comb(n + l, n)
    return c - (math.comb(n + l - 2, n) if l >= 2 else 0)


def annulus_mode_roots(rho: float, k: int):
    """Steklov eigenvalues of {rho < |x| < 1} for angular mode k (unit scale)."""
    if k == 0:
        return [0.0, (1.0 + rho) / (rho * math.log(1.0 / rho))]
    # u = a r^k + b r^-k; outward conditions at r = 1 and r = rho
    p, q = rho**k, rho ** (-k)
    a2 = q - p
    a1 = -k * (q + q / rho + p + p / rho)
    a0 = k * k * (q / rho - p / rho)
    disc = math.sqrt(a1 * a1 - 4 * a2 * a0)
    # stable quadratic roots
    s = -0.5 * (a1 - disc) if a1 < 0 else -0.5 * (a1 + disc)
    r1, r2 = s / a2, a0 / s
    return sorted([r1, r2])


def steklov_closed_form(spec: DomainSpec, K: int) -> Spectrum:
    """First K Steklov eigenvalues (with multiplicity) of a Disk, Annulus or Ball."""
    spec = make_domain(spec)
    if K < 1:
        raise ConfigError("K must be at least 1")
    R = spec.radius
    if spec.kind == DomainKind.DISK:
        kmax = K // 2 + 1
        vals = np.arange(kmax + 1) / R
        mults = np.full(kmax + 1, 2, dtype=np.int64)
        mults[0] = 1
    elif spec.kind == DomainKind.BALL:
        n = spec.n
        vals, mults, total, l = [], [], 0, 0
        while total < K:
            m = ball_multiplicity(n, l)
            vals.append(l / R)
            mults.append(m)
            total += m
            l += 1
        vals, mults = np.array(vals, dtype=float), np.array(mults, dtype=np.int64)
    elif spec.kind == DomainKind.ANNULUS:
        rho = spec.inner_radius
        kmax = int(math.ceil(K / rho)) + 2
        raw, rm = [], []
        for k in range(kmax + 1):
            for root in annulus_mode_roots(rho, k):
                raw.append(root / R)
                rm.append(1 if k == 0 else 2)
        raw, rm = np.array(raw), np.array(rm)
        order = np.argsort(raw)
        raw, rm = raw[order], rm[order]
        # merge coincident levels from different modes
        gv, gm = group_eigenvalues(np.repeat(raw, rm), rel_tol=1e-12)
        vals, mults = gv, gm
    else:
        raise UnsupportedKind(f"no closed form for {spec.kind.value}")
    vals, mults = _truncate(vals, mults, K)
    return Spectrum(vals, mults, spec.n, spec.boundary_volume, CLOSED_FORM, 0.0, spec.label)


# --- numerical Dirichlet-to-Neumann map -----------------------------------------


@dataclass(frozen=True)
class DtNOperator:
    """Symmetrized DtN matrix on the orthonormal trigonometric basis.

    Row/column order: 1/sqrt(2 pi), cos(k t)/sqrt(pi) for k = 1..N,
    sin(k t)/sqrt(pi) for k = 1..N, where t is the boundary parameter. The
    matrix is sqrt(s') Lambda (1/sqrt(s')) with s' the arc-length speed, which
    is similar to Lambda and symmetric under the uniform parameter measure.
    """

    matrix: np.ndarray
    theta: np.ndarray
    weights: np.ndarray
    asymmetry: float
    residual: float
    interior_degree: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _arnoldi_basis(z: np.ndarray, degree: int):
    """Polynomials p_0..p_degree orthonormal over the nodes z, and p_k'.

    Same span as the monomials z^k, built by a two-pass Gram-Schmidt Arnoldi
    recurrence so the collocation matrix stays well conditioned.
    """
    m = len(z)
    Q = np.zeros((m, degree + 1), dtype=complex)
    D = np.zeros_like(Q)
    Q[:, 0] = 1.0
    for k in range(degree):
        q = z * Q[:, k]
        d = Q[:, k] + z * D[:, k]
        for _ in range(2):
            h = Q[:, : k + 1].conj().T @ q / m
            q = q - Q[:, : k + 1] @ h
            d = d - D[:, : k + 1] @ h
        nrm = np.linalg.norm(q) / math.sqrt(m)
        Q[:, k + 1] = q / nrm
        D[:, k + 1] = d / nrm
    return Q, D


def _trig_basis(theta: np.ndarray, N: int) -> np.ndarray:
    k = np.arange(1, N + 1)
    return np.hstack(
        [
            np.full((len(theta), 1), 1.0 / math.sqrt(2 * math.pi)),
            np.cos(np.outer(theta, k)) / math.sqrt(math.pi),
            np.sin(np.outer(theta, k)) / math.sqrt(math.pi),
        ]
    )


def _assemble(spec, N, degree):
    m = 4 * degree + 8
    theta = 2 * np.pi * np.arange(m) / m
    z, dz, speed = star_boundary(spec, theta)
    normal = -1j * dz / speed
    # harmonic basis Re p_k, Im p_k with p_k of degree k; grad Re p . n = Re(p' n)
    Q, Dq = _arnoldi_basis(z / np.max(np.abs(z)), degree)
    scale = 1.0 / np.max(np.abs(z))
    dn = Dq * normal[:, None] * scale
    H = np.hstack([Q.real, Q[:, 1:].imag])
    Hn = np.hstack([dn.real, dn[:, 1:].imag])
    Phi = _trig_basis(theta, N)
    root = np.sqrt(speed)
    data = Phi / root[:, None]
    coef, _, _, _ = sla.lstsq(H, data, lapack_driver="gelsy")
    residual = float(np.linalg.norm(H @ coef - data) / np.linalg.norm(data))
    w = 2 * np.pi / m
    L = w * Phi.T @ (root[:, None] * (Hn @ coef))
    return L, theta, np.full(m, w), residual


def assemble_dtn(
    spec: DomainSpec,
    N_modes: int,
    interior_degree: Optional[int] = None,
    residual_tol: float = 1e-10,
    max_degree_factor: int = 8,
) -> DtNOperator:
    """Assemble the (2 N_modes + 1)^2 DtN matrix for a star-shaped planar domain.

    The interior Dirichlet problem is solved by least squares in harmonic
    polynomials of degree <= interior_degree on 4*degree + 8 collocation
    nodes. Without an explicit degree, it starts at 2 N_modes and doubles
    until the fit residual drops below ``residual_tol``.
    """
    spec = make_domain(spec)
    if spec.kind not in (DomainKind.STAR_PLANAR, DomainKind.DISK):
        raise UnsupportedKind(f"numeric DtN handles StarPlanar or Disk, not {spec.kind.value}")
    if N_modes < 16 or N_modes % 2:
        raise ConfigError("N_modes must be even and at least 16")
    degrees = (
        [interior_degree]
        if interior_degree is not None
        else [2 * N_modes * 2**j for j in range(int(math.log2(max_degree_factor)))]
    )
    for deg in degrees:
        L, theta, w, residual = _assemble(spec, N_modes, deg)
        if residual <= residual_tol:
            break
    if residual > residual_tol:
        raise IllConditioned(
            f"interior least-squares residual {residual:.2e} exceeds {residual_tol:.0e}",
            residual=residual,
        )
    asym = float(np.linalg.norm(L - L.T) / np.linalg.norm(L))
    return DtNOperator(0.5 * (L + L.T), theta, w, asym, residual, deg)


def _numeric_eigs(spec, N_modes):
    op = assemble_dtn(spec, N_modes)
    ev = sla.eigh(op.matrix, eigvals_only=True)
    return ev, op


def steklov_numeric(
    spec: DomainSpec,
    N_modes: int,
    K: int,
    tol: float = 1e-6,
    group_tol: float = 1e-6,
) -> Spectrum:
    """First K Steklov eigenvalues from the numeric DtN map.

    Accuracy is the largest relative change of the first K eigenvalues between
    N_modes and 2 N_modes (plus the recorded asymmetry); NotConverged is raised
    when it exceeds ``tol``.
    """
    spec = make_domain(spec)
    if spec.kind not in (DomainKind.STAR_PLANAR, DomainKind.DISK):
        raise UnsupportedKind(f"numeric DtN handles StarPlanar or Disk, not {spec.kind.value}")
    if K > N_modes:
        raise ConfigError("K must not exceed N_modes")
    ev1, op1 = _numeric_eigs(spec, N_modes)
    ev2, op2 = _numeric_eigs(spec, 2 * N_modes)
    a, b = ev1[:K], ev2[:K]
    scale = max(abs(ev1[-1]), 1.0)
    if a[0] < -1e-8 * scale:
        raise NotConverged(f"DtN matrix has negative eigenvalue {a[0]:.3e}")
    denom = np.maximum(np.abs(b), 1e-12 * scale)
    gap = float(np.max(np.abs(a - b) / np.where(np.abs(b) > 1e-9 * scale, denom, scale)))
    accuracy = max(gap, op1.asymmetry, op2.asymmetry)
    if gap > tol:
        raise NotConverged(f"self-convergence gap {gap:.2e} exceeds {tol:.0e}")
    a = np.where(np.abs(a) <= 1e-9 * scale, 0.0, a)
    vals, mults = group_eigenvalues(a, rel_tol=group_tol, abs_tol=1e-9 * scale)
    vals = np.where(vals < 0, 0.0, vals)
    return Spectrum(vals, mults, 1, spec.boundary_volume, NUMERIC, accuracy, spec.label)


def weyl_ratio(spec: Spectrum, tau: float) -> float:
    """N(tau) (2 pi)^n / (omega_n vol tau^n); tends to 1 as tau grows."""
    if spec.vol is None:
        raise ConfigError("spectrum lacks boundary volume")
    n = spec.n
    return spec.counting(tau) * (2 * math.pi) ** n / (ball_volume(n) * spec.vol * tau**n)


# --- CSV ---------------------------------------------------------------------


def spectrum_to_csv(spec: Spectrum) -> str:
    vol = "" if spec.vol is None else repr(float(spec.vol))
    lines = [
        "n,vol,source,accuracy",
        f"{spec.n},{vol},{spec.source},{spec.accuracy!r}",
        "index,eigenvalue,multiplicity",
    ]
    for i, (v, m) in enumerate(zip(spec.eigenvalues, spec.multiplicities)):
        lines.append(f"{i},{float(v)!r},{int(m)}")
    return "\n".join(lines) + "\n"


def spectrum_from_csv(text: str, label: str = "") -> Spectrum:
    rows = [r.strip() for r in text.strip().splitlines() if r.strip()]
    if rows[0] != "n,vol,source,accuracy" or rows[2] != "index,eigenvalue,multiplicity":
        raise ConfigError("not a spectrum CSV")
    n, vol, source, acc = rows[1].split(",")
    ev, mu = [], []
    for r in rows[3:]:
        _, v, m = r.split(",")
        ev.append(float(v))
        mu.append(int(m))
    return Spectrum(
        np.array(ev), np.array(mu), int(n), float(vol) if vol else None, source, float(acc), label
    )
