"""
Determinants of principal blocks
================================

For a positive definite A, det(A) is at most det(A[alpha]) det(A[alpha^c]),
with equality only for block diagonal A. The rank inequality is the same
statement with products replaced by sums.
"""

import numpy as np

from rangeproj import check_hadamard_fischer, check_rank_inequality
from rangeproj.generators import GenConfig, random_pd, random_psd
from rangeproj.pinching import PinchingMap, two_block

A = random_pd(GenConfig(seed=11, n=6, rank=6))
alpha = (0, 2, 5)
v = check_hadamard_fischer(A, alpha)
w = v.witnesses
print(f"det(A) = {w['det_A']:.4g} <= {w['det_alpha']:.4g} * {w['det_complement']:.4g}")

# zero the off-diagonal blocks and the inequality becomes an equality
phi = PinchingMap(two_block(alpha, 6))
mask = phi.mask()
print("block diagonal part, equality observed:", check_hadamard_fischer(np.where(mask, A, 0), alpha).equality_observed)

B = random_psd(GenConfig(seed=11, n=6, rank=2))
print("rank witnesses:", {k: val for k, val in check_rank_inequality(B, phi).witnesses.items() if k != "offdiag_norm"})
