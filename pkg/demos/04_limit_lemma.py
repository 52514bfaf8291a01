"""
Range projection as a limit of powers
=====================================

After scaling A to unit norm, (A/||A||)**r tends to the range projection as
r goes to 0. The error is 1 - mu**r for the smallest nonzero eigenvalue
ratio mu, so it is at most r |log mu|.
"""

import numpy as np

from rangeproj import range_projection, range_projection_via_limit
from rangeproj.functional_calculus import default_schedule, smallest_retained_ratio

A = np.diag([4.0, 1.0, 0.25, 0.0])
schedule = default_schedule(12)
P, errors = range_projection_via_limit(A, schedule)
mu = smallest_retained_ratio(A)

print("mu_min =", mu)
for r, e in zip(schedule, errors):
    print(f"r={r:.2e}  error={e:.3e}  bound={r * abs(np.log(mu)):.3e}")
print("matches the direct range projection:", np.allclose(P, range_projection(A)))
