"""
Pinching and fractional powers
==============================

For 0 < r < 1, pinching A**r gives something below the r-th power of the
pinched matrix. The margin shrinks as r approaches 1, where both sides
become Phi(A).
"""

import numpy as np

from rangeproj import PinchingMap, check_jensen_power, scalar_power_integral
from rangeproj.generators import GenConfig, random_partition, random_psd

A = random_psd(GenConfig(seed=3, n=8, rank=5))
phi = PinchingMap(random_partition(3, 8, 3))
print("partition:", phi.partition)

print(f"{'r':>6} {'lambda_min':>12} {'lambda_max':>12}")
for r in (0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999):
    v = check_jensen_power(A, phi, r)
    print(f"{r:>6} {v.gap:>12.3e} {v.excess:>12.3e}")

# the inequality comes from writing t**r as an average of t/(lam+t)
for t in (0.01, 1.0, 100.0):
    print(f"t={t:>6}: quadrature {scalar_power_integral(t, 0.3):.12f}, direct {t ** 0.3:.12f}")
