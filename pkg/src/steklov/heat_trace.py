"""Heat traces Z(t) = sum exp(-lambda_k t) with truncation control."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from ._quadrature import ball_volume
from .errors import MissingVolumeMetadata, NonPositiveTime, TailTooLarge, UnsupportedKind
from .geometry import DomainKind, DomainSpec, make_domain
from .spectrum import Spectrum, spectrum_to_csv

TAIL_SAFETY = 2.0


def spectrum_hash(spec: Spectrum) -> str:
    return hashlib.sha256(spectrum_to_csv(spec).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class HeatTraceSamples:
    t_grid: np.ndarray
    values: np.ndarray
    tail_estimates: np.ndarray
    spectrum_hash: str = ""

    def to_csv(self) -> str:
        lines = ["t,Z,tail_estimate"]
        for t, z, e in zip(self.t_grid, self.values, self.tail_estimates):
            lines.append(f"{float(t)!r},{float(z)!r},{float(e)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "HeatTraceSamples":
        rows = [r for r in text.strip().splitlines()[1:] if r.strip()]
        arr = np.array([[float(v) for v in r.split(",")] for r in rows])
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    def window(self, t_min: float, t_max: float) -> "HeatTraceSamples":
        keep = (self.t_grid >= t_min * (1 - 1e-12)) & (self.t_grid <= t_max * (1 + 1e-12))
        return HeatTraceSamples(
            self.t_grid[keep], self.values[keep], self.tail_estimates[keep], self.spectrum_hash
        )


def weyl_tail(spec: Spectrum, t: float) -> float:
    """Estimate of sum_{lambda > lambda_K} exp(-lambda t).

    Integrates the Weyl density n omega_n vol lambda^(n-1) / (2 pi)^n against
    exp(-lambda t) beyond the largest stored eigenvalue, times a safety factor
    of 2. An estimate, not a rigorous bound.
    """
    if t <= 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if spec.vol is None:
        raise MissingVolumeMetadata("spectrum has no boundary volume")
    n = spec.n
    lam = spec.lambda_max
    density = n * ball_volume(n) * spec.vol / (2 * math.pi) ** n
    # integral_lam^inf x^(n-1) e^(-x t) dx = Gamma(n) Q(n, lam t) / t^n
    tail = density * math.gamma(n) * float(gammaincc(n, lam * t)) / t**n
    return TAIL_SAFETY * tail


def partial_traces(spec: Spectrum, ts) -> np.ndarray:
    """Stored-eigenvalue sums for many t at once.

    Terms are added smallest first (largest eigenvalues first) with numpy's
    pairwise summation, so the rounding error grows like eps * log K.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    lam = spec.eigenvalues[::-1]
    mult = spec.multiplicities[::-1].astype(float)
    out = np.empty(len(ts))
    chunk = max(1, int(4e6 // max(len(lam), 1)))
    for i in range(0, len(ts), chunk):
        tt = ts[i : i + chunk]
        out[i : i + chunk] = np.sum(mult * np.exp(-np.outer(tt, lam)), axis=1)
    return out


def partial_trace(spec: Spectrum, t: float) -> float:
    return float(partial_traces(spec, [t])[0])


def trace_value(spec: Spectrum, t: float):
    """(Z(t) partial sum, tail estimate)."""
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    value = partial_trace(spec, t)
    tail = weyl_tail(spec, t) if spec.vol is not None else 0.0
    return value, tail


def geometric_grid(t_min: float, t_max: float, per_decade: int = 40) -> np.ndarray:
    if not (0 < t_min < t_max):
        raise NonPositiveTime("need 0 < t_min < t_max")
    num = int(round(per_decade * math.log10(t_max / t_min))) + 1
    return np.geomspace(t_min, t_max, max(num, 2))


def trace_samples(
    spec: Spectrum,
    t_min: float,
    t_max: float,
    per_decade: int = 40,
    tail_tol: float = 1e-8,
) -> HeatTraceSamples:
    """Z on a geometric grid; refuses grids whose tail exceeds tail_tol * Z."""
    grid = geometric_grid(t_min, t_max, per_decade)
    if not t_min > 0:
        raise NonPositiveTime("t must be positive")
    vals = partial_traces(spec, grid)
    tails = np.array([weyl_tail(spec, t) if spec.vol is not None else 0.0 for t in grid])
    bad = np.nonzero(tails > tail_tol * vals)[0]
    if len(bad):
        t = grid[bad[0]]
        raise TailTooLarge(
            f"tail {tails[bad[0]]:.2e} exceeds {tail_tol:.0e} * Z at t = {t:.3e}; "
            f"increase the eigenvalue count or raise t_min"
        )
    return HeatTraceSamples(grid, vals, tails, spectrum_hash(spec))


def minimal_t(spec: Spectrum, tail_tol: float = 1e-8) -> float:
    """Smallest t (to 1%) with weyl_tail(t) <= tail_tol * Z(t)."""
    lo, hi = 1e-12, 1e3
    if weyl_tail(spec, hi) > tail_tol * partial_trace(spec, hi):
        raise TailTooLarge("spectrum too short for any t")
    while hi / lo > 1.01:
        mid = math.sqrt(lo * hi)
        if weyl_tail(spec, mid) <= tail_tol * partial_trace(spec, mid):
            hi = mid
        else:
            lo = mid
    return hi


def model_kernel_diagonal(spec: DomainSpec, t: float) -> float:
    """On-diagonal heat kernel K(t, x, x) of the DtN map on Disk or Ball n=2.

    Homogeneity makes it independent of x. Disk: coth(t/2R)/(2 pi R). Unit
    ball in R^3: Z(t)/(4 pi) by the addition theorem for spherical harmonics.
    """
    if not t > 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    spec = make_domain(spec)
    R = spec.radius
    if spec.kind == DomainKind.DISK:
        return 1.0 / (math.tanh(t / (2 * R)) * 2 * math.pi * R)
    if spec.kind == DomainKind.BALL and spec.n == 2:
        x = math.exp(-t / R)
        return (1 + x) / (1 - x) ** 2 / (4 * math.pi * R * R)
    raise UnsupportedKind(f"no model kernel for {spec.kind.value} n={spec.n}")
