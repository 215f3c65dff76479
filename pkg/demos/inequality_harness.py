"""Trace inequalities on S^2 with a calibrated boundary constant.

A is the sharp Sobolev-trace constant; B is fitted from random band-limited
data with a safety factor, and then every inequality is checked on fresh
data. This is a small version of `steklov check-inequalities`.
"""

from collections import Counter

from steklov.validation import inequality_harness

cal, reports = inequality_harness(functions=100, potentials=10, band_limit=16)
print(f"A = {cal.A:.6f}, B = {cal.B:.6f} (raw max {cal.raw_max:.6f} over {cal.samples} samples)\n")

held, total = Counter(), Counter()
worst = {}
for r in reports:
    total[r.which.value] += 1
    held[r.which.value] += r.holds
    rel = r.margin / max(abs(r.rhs), 1e-300)
    worst[r.which.value] = min(worst.get(r.which.value, rel), rel)

for k in sorted(total):
    print(f"{k:16s} {held[k]:4d}/{total[k]:<4d} smallest relative margin {worst[k]:.3e}")
