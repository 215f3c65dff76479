"""Hear the boundary of the unit ball in R^3 from its Steklov spectrum.

The eigenvalues are l = 0, 1, 2, ... with multiplicity 2l + 1. We sum the
heat trace, fit the small-t expansion and read off the boundary area and the
total mean curvature.
"""

import math

from steklov.geometry import DomainKind, DomainSpec, curvature_field
from steklov.hearing import comparison_table, fit_expansion, invert_geometry, select_window
from steklov.heat_trace import trace_samples
from steklov.invariants import integrated_coefficients
from steklov.spectrum import steklov_closed_form

spec = DomainSpec(DomainKind.BALL, 2)
sp = steklov_closed_form(spec, 10**10)
print(f"{sp.count} eigenvalues, largest {sp.lambda_max:.0f}")

lo, hi = select_window(sp, 2, 3)
samples = trace_samples(sp, lo, hi)
print(f"window [{lo:.2e}, {hi:.2e}], {len(samples.t_grid)} samples, worst relative tail {(samples.tail_estimates / samples.values).max():.1e}")

fit = fit_expansion(samples, 2, 3)
ints = integrated_coefficients(curvature_field(spec, 32)).integrals
print("\n m   fitted c_m        integral of a_m")
for m, c, ref, _, _ in comparison_table(fit, ints):
    print(f" {m}   {c:.10f}   {ref:.10f}")

geo = invert_geometry(fit)
print(f"\narea       {geo.boundary_volume:.8f}  (4 pi = {4 * math.pi:.8f})")
print(f"int sum k  {geo.mean_curvature_integral:.6f}  (8 pi = {8 * math.pi:.6f})")
