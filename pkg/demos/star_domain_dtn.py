"""Steklov eigenvalues of a three-lobed planar domain.

The boundary is r = 1 + 0.1 cos 3 theta. Rotational symmetry of order 3
splits the degenerate disk pairs 3k, 3k: they separate while the other
pairs stay (nearly) double.
"""

import numpy as np

from steklov.geometry import DomainKind, DomainSpec, make_domain
from steklov.spectrum import steklov_closed_form, steklov_numeric

star = make_domain(DomainSpec(DomainKind.STAR_PLANAR, 1, radial_coeffs=((3, 0.1, 0.0),)))
disk = steklov_closed_form(DomainSpec(DomainKind.DISK, 1), 21)
sp = steklov_numeric(star, N_modes=64, K=21)

print(f"perimeter {star.boundary_volume:.10f}")
print(f"accuracy estimate {sp.accuracy:.1e}\n")
print(" k   disk      star        star * perimeter / 2 pi")
scale = star.boundary_volume / (2 * np.pi)
for k, (a, b) in enumerate(zip(disk.expanded(), sp.expanded())):
    print(f"{k:2d}   {a:4.0f}   {b:12.8f}   {b * scale:12.8f}")
