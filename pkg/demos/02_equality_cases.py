"""
When does equality hold?
========================

Equality holds exactly when the range projection of A is already block
diagonal. We build one matrix of each kind on the same non-contiguous
partition and compare the verdicts.
"""

import numpy as np

from rangeproj import PinchingMap, check_main_theorem, parse_partition
from rangeproj.generators import psd_with_block_diag_range, psd_with_strict_gap

phi = PinchingMap(parse_partition("1,4|2,5|3,6"))

# block diagonal range: ranks 1, 2, 0 on the three blocks
A = psd_with_block_diag_range(phi, [1, 2, 0], seed=7)
# a unit vector spread over two blocks
B = psd_with_strict_gap(phi, seed=7, noise_rank=1)

for label, M in (("block diagonal range", A), ("spread range", B)):
    v = check_main_theorem(M, phi)
    print(f"{label:>22}: predicted={v.equality_predicted!s:<5} observed={v.equality_observed!s:<5} "
          f"excess={v.excess:.3e} offdiag={v.witnesses['offdiag_norm']:.3e}")

# rotating inside each block keeps the range block diagonal
rng = np.random.default_rng(0)
Q = np.zeros((6, 6), dtype=complex)
for block in phi.partition.blocks:
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Q[np.ix_(block, block)] = np.linalg.qr(X)[0]
C = Q @ A @ Q.conj().T
print("after a block unitary: observed =", check_main_theorem((C + C.conj().T) / 2, phi).equality_observed)
