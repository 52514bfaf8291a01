"""
The two-by-two running example
==============================

The all-ones matrix has rank one. Pinching it onto the diagonal gives the
identity, whose range is everything. The range projection of the pinched
matrix therefore sits strictly above the pinched range projection.
"""

import numpy as np

from rangeproj import (
    PinchingMap,
    apply_pinching,
    check_main_theorem,
    check_rank_inequality,
    parse_partition,
    range_projection,
)

A = np.ones((2, 2))
phi = PinchingMap(parse_partition("1|2"))

R = range_projection(A)
print("R[A] =\n", R)

# pinch the range projection, and take the range projection of the pinched matrix
lhs = apply_pinching(phi, R)
rhs = range_projection(apply_pinching(phi, A))
print("Phi(R[A]) =\n", lhs)
print("R[Phi(A)] =\n", rhs)

v = check_main_theorem(A, phi)
print(f"holds={v.holds}  gap={v.gap:.3f}  equality observed={v.equality_observed}")

# the same statement counted in ranks: 1 <= 1 + 1
w = check_rank_inequality(A, phi).witnesses
print(f"rank(A) = {w['rank_A']} <= {w['rank_block_1']} + {w['rank_block_2']}")
