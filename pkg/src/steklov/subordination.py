"""exp(-t sqrt(-Delta)) from Laplace spectra, and the flat Poisson kernel."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import roots_legendre

from .errors import NonPositiveArgument, NotSPD, QuadratureNotConverged, UnsupportedKind
from .geometry import DomainKind, DomainSpec, make_domain
from .spectrum import LAPLACE, Spectrum, ball_multiplicity


def subordination_weight(t, mu):
    """t exp(-t^2 / 4 mu) / sqrt(4 pi mu^3); its Laplace transform is exp(-t sqrt(lambda))."""
    t = np.asarray(t, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(t <= 0) or np.any(mu <= 0):
        raise NonPositiveArgument("t and mu must be positive")
    out = t * np.exp(-t * t / (4 * mu)) / np.sqrt(4 * math.pi * mu**3)
    return float(out) if out.ndim == 0 else out


def _panels(v_lo, v_peak=0.0):
    """Panel edges in v = sqrt(t^2 / 4 mu).

    Geometric panels from v_lo up to 1/sqrt(2) (that is mu down to t^2/2),
    half-width panels beyond, up to 7 past the integrand peak v_peak.
    """
    split = 1 / math.sqrt(2)
    geo = [split]
    while geo[-1] > v_lo:
        geo.append(geo[-1] / 2)
    lin = list(np.arange(split + 0.5, max(7.0, v_peak + 7.0) + 1e-12, 0.5))
    return [0.0] + geo[::-1] + lin


def _composite(fv, edges, order):
    x, w = roots_legendre(order)
    a = np.asarray(edges[:-1])
    b = np.asarray(edges[1:])
    half = (b - a) / 2
    nodes = (a[:, None] + b[:, None]) / 2 + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return float(np.sum(weights * fv(nodes.ravel()).reshape(nodes.shape)))


def subordinate(f, t: float, scale_hint: float = 1.0, order: int = 32, tol: float = 1e-8) -> float:
    """Integral over mu of subordination_weight(t, mu) f(mu).

    With mu = t^2 / (4 v^2) the weight becomes (2 / sqrt pi) exp(-v^2) dv,
    which removes the essential singularity at mu = 0. ``scale_hint`` is the
    smallest rate sqrt(lambda) at which f varies; panels are refined down to
    a thousandth of t * scale_hint / 2 and extended past the integrand's
    peak at v = sqrt(t * scale_hint / 2). The rule is compared against half
    its order and QuadratureNotConverged is raised above ``tol``.
    """
    if t <= 0:
        raise NonPositiveArgument("t must be positive")
    v_lo = max(1e-3 * t * max(scale_hint, 1e-12) / 2, 1e-200)
    # exp(-v^2 - t^2 r^2 / 4 v^2) peaks at v^2 = t r / 2 for the rate r = scale_hint
    edges = _panels(v_lo, math.sqrt(t * max(scale_hint, 0.0) / 2))

    def fv(v):
        return 2 / math.sqrt(math.pi) * np.exp(-v * v) * f(t * t / (4 * v * v))

    hi = _composite(fv, edges, order)
    lo = _composite(fv, edges, order // 2)
    if abs(hi - lo) > tol * max(abs(hi), 1e-300):
        raise QuadratureNotConverged(f"subordination quadrature changed by {abs(hi - lo):.2e}")
    return hi


def laplace_spectrum(spec: DomainSpec, K_levels: int) -> Spectrum:
    """Eigenvalues of -Delta on the boundary of a Disk (circle) or Ball (sphere).

    Circle of radius R: k^2 / R^2 with multiplicity 2. Sphere S^n: l(l+n-1)/R^2
    with the spherical-harmonic multiplicity. ``K_levels`` distinct levels.
    """
    spec = make_domain(spec)
    R = spec.radius
    l = np.arange(K_levels)
    if spec.kind == DomainKind.DISK:
        vals = (l / R) ** 2
        mult = np.where(l == 0, 1, 2)
    elif spec.kind in (DomainKind.BALL, DomainKind.ROUND_SPHERE):
        n = spec.n
        vals = l * (l + n - 1) / R**2
        mult = np.array([ball_multiplicity(n, int(j)) for j in l])
    else:
        raise UnsupportedKind(f"no Laplace spectrum for {spec.kind.value}")
    return Spectrum(vals.astype(float), mult, spec.n, spec.boundary_volume, LAPLACE, 0.0, spec.label)


def heat_trace_laplace(spec: Spectrum, mu):
    """sum_k exp(-mu mu_k) with multiplicity, vectorized over mu."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    return np.exp(-np.outer(mu, spec.eigenvalues)) @ spec.multiplicities


def subordinated_trace(spec: Spectrum, t: float, check: bool = True, tol: float = 1e-8) -> float:
    """sum_k exp(-t sqrt(mu_k)).

    With ``check`` the same number is rebuilt as the mu-integral of the
    subordination weight against the Laplace heat trace, and the two must
    agree to ``tol`` relative.
    """
    if t <= 0:
        raise NonPositiveArgument("t must be positive")
    roots = np.sqrt(spec.eigenvalues)
    direct = math.fsum(spec.multiplicities * np.exp(-t * roots))
    if check:
        positive = roots[roots > 0]
        hint = float(positive[0]) if len(positive) else 1.0
        via = subordinate(lambda mu: heat_trace_laplace(spec, mu), t, hint, tol=tol)
        if abs(via - direct) > tol * abs(direct):
            raise QuadratureNotConverged(
                f"subordinated trace {via!r} disagrees with spectral sum {direct!r}"
            )
    return direct


def flat_poisson_kernel(h, t: float, x) -> float:
    """Gamma((n+1)/2) / pi^((n+1)/2) * t / (t^2 + x^T h x)^((n+1)/2)."""
    h = np.atleast_2d(np.asarray(h, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = h.shape[0]
    if t <= 0:
        raise NonPositiveArgument("t must be positive")
    if h.shape != (n, n) or not np.allclose(h, h.T) or np.min(np.linalg.eigvalsh(h)) <= 0:
        raise NotSPD("h must be symmetric positive definite")
    if x.shape[-1] != n:
        raise ValueError("x has the wrong dimension")
    q = np.einsum("...i,ij,...j->...", x, h, x)
    c = math.gamma((n + 1) / 2) / math.pi ** ((n + 1) / 2)
    out = c * t / (t * t + q) ** ((n + 1) / 2)
    return float(out) if np.ndim(out) == 0 else out
