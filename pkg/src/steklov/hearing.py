"""Fit the small-t expansion of a heat trace and read off boundary geometry."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._quadrature import sphere_volume
from .errors import IllConditionedFit, NotRecoverable, WindowTooNarrow
from .heat_trace import HeatTraceSamples

MAX_CONDITION = 1e10


@dataclass(frozen=True)
class ExpansionFit:
    n: int
    orders: tuple
    coefficients: np.ndarray
    log_coefficient: Optional[float]
    residual: float
    condition: float
    window: tuple
    reliable: bool = True
    guard_coefficients: tuple = ()

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "orders": list(self.orders),
            "coefficients": [float(c) for c in self.coefficients],
            "log_coefficient": None if self.log_coefficient is None else float(self.log_coefficient),
            "residual": float(self.residual),
            "condition": float(self.condition),
            "window": [float(w) for w in self.window],
            "reliable": bool(self.reliable),
            "guard_coefficients": [float(c) for c in self.guard_coefficients],
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def fit_expansion(
    samples: HeatTraceSamples,
    n: int,
    M: int,
    include_log: Optional[bool] = None,
    window: Optional[tuple] = None,
    residual_tol: float = 1e-3,
    guard: int = 2,
) -> ExpansionFit:
    """Weighted least squares for Z(t) ~ sum_{m<M} c_m t^(m-n) [+ c_log t^(M-1-n) log t].

    Rows are divided by Z(t) (weights 1/Z^2) and columns scaled to unit norm.
    The log column defaults on exactly when n = M - 1. ``guard`` further
    powers t^(m-n), m = M .. M+guard-1, are fitted and then set aside so the
    first neglected terms do not leak into the reported coefficients.
    """
    if not 1 <= M <= 4:
        raise ValueError("M must be between 1 and 4")
    if not 0 <= guard <= 2:
        raise ValueError("guard must be 0, 1 or 2")
    if include_log is None:
        include_log = n == M - 1
    if window is not None:
        samples = samples.window(*window)
    t = np.asarray(samples.t_grid, dtype=float)
    z = np.asarray(samples.values, dtype=float)
    ncols = M + guard + (1 if include_log else 0)
    if len(t) < 3 * ncols:
        raise WindowTooNarrow(f"{len(t)} samples for {ncols} unknowns; need at least {3 * ncols}")
    cols = [t ** (m - n) for m in range(M + guard)]
    if include_log:
        cols.append(t ** (M - 1 - n) * np.log(t))
    X = np.column_stack(cols) / z[:, None]
    norms = np.linalg.norm(X, axis=0)
    Xs = X / norms
    sv = np.linalg.svd(Xs, compute_uv=False)
    cond = float(sv[0] / sv[-1])
    if cond > MAX_CONDITION:
        raise IllConditionedFit(f"design condition number {cond:.2e} exceeds {MAX_CONDITION:.0e}")
    y = np.ones_like(z)
    sol, *_ = np.linalg.lstsq(Xs, y, rcond=None)
    coef = sol / norms
    residual = float(np.linalg.norm(Xs @ sol - y) / math.sqrt(len(y)))
    return ExpansionFit(
        n=n,
        orders=tuple(range(M)),
        coefficients=coef[:M],
        log_coefficient=float(coef[M + guard]) if include_log else None,
        residual=residual,
        condition=cond,
        window=(float(t[0]), float(t[-1])),
        reliable=residual <= residual_tol,
        guard_coefficients=tuple(float(c) for c in coef[M : M + guard]),
    )


def a1_prefactor(n: int) -> float:
    """a_1 / sum(kappa) = (1/2pi)^n (n-1) Gamma(n) vol(S^(n-1)) / (2n)."""
    return (1 / (2 * math.pi)) ** n * (n - 1) * math.gamma(n) * sphere_volume(n) / (2 * n)


@dataclass(frozen=True)
class RecoveredGeometry:
    boundary_volume: float
    mean_curvature_integral: Optional[float]
    a2_integral: Optional[float]
    notes: dict = field(default_factory=dict)


def invert_geometry(fit: ExpansionFit) -> RecoveredGeometry:
    """Boundary volume from c_0 and the integral of sum(kappa) from c_1.

    The curvature channel is silent for n = 1; use :func:`mean_curvature_integral`
    to get the NotRecoverable error explicitly.
    """
    n = fit.n
    vol = fit.coefficients[0] * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)
    mean = None
    notes = {}
    if len(fit.coefficients) > 1:
        try:
            mean = mean_curvature_integral(fit)
        except NotRecoverable as exc:
            notes["mean_curvature"] = str(exc)
    a2 = float(fit.coefficients[2]) if len(fit.coefficients) > 2 else None
    return RecoveredGeometry(float(vol), mean, a2, notes)


def mean_curvature_integral(fit: ExpansionFit) -> float:
    n = fit.n
    if n == 1:
        raise NotRecoverable("a_1 carries the factor (n - 1) and vanishes for n = 1")
    if len(fit.coefficients) < 2:
        raise NotRecoverable("fit has no t^(1-n) coefficient")
    return float(fit.coefficients[1] / a1_prefactor(n))


def comparison_table(fit: ExpansionFit, integrals: dict) -> list:
    """Rows (m, fitted c_m, integral of a_m, absolute gap, relative gap)."""
    rows = []
    for m, c in zip(fit.orders, fit.coefficients):
        ref = integrals.get(m)
        if ref is None:
            rows.append((m, float(c), None, None, None))
            continue
        gap = float(c - ref)
        rel = abs(gap) / abs(ref) if ref != 0 else None
        rows.append((m, float(c), float(ref), gap, rel))
    return rows


def select_window(spectrum, n: int, M: int, per_decade: int = 40, span: float = 0.1):
    """Default fit window (t_min, t_max) for a spectrum.

    t_min is 1.05 times the smallest t where the Weyl tail stays below
    1e-8 Z. t_max is ``span / lambda_1``; with two guard orders the
    truncation error of c_m then scales like t_max^(M+2-m).
    """
    from .heat_trace import minimal_t

    t_min = 1.05 * minimal_t(spectrum)
    positive = spectrum.eigenvalues[spectrum.eigenvalues > 0]
    t_max = span / float(positive[0]) if len(positive) else span
    needed = 3 * (M + 3)
    if t_max <= t_min or per_decade * math.log10(t_max / t_min) + 1 < needed:
        raise WindowTooNarrow(
            f"window [{t_min:.3e}, {t_max:.3e}] too short for {needed} samples; use more eigenvalues"
        )
    return t_min, t_max
