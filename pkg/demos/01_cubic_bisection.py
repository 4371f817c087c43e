"""
Bisection on a one-dimensional cubic
====================================

MOST in its smallest form: one variable, two halves, two Monte Carlo sums.
The cubic below has a local minimum inside [0, 1] at (5 + sqrt 13) / 12.
"""

import numpy as np

from mostopt import MostConfig, RandomSource, most_optimize
from mostopt.benchfns import CUBIC_ARGMIN, get_benchmark

spec = get_benchmark("cubic")
print("f(0) =", spec.func(np.zeros(1)), " f(1) =", spec.func(np.ones(1)))

# %%
# Each epoch halves the interval. Watch the kept half move towards the minimum.
res = most_optimize(spec.objective(), spec.bounds,
                    MostConfig(samples=2000, max_epochs=25, width_threshold=0.0),
                    RandomSource(1))
for rec in res.trace.records[:6]:
    lo = rec.estimate[0] - rec.widths[0] / 2
    print(f"epoch {rec.step:2d}: [{lo:.6f}, {lo + rec.widths[0]:.6f}]")

# %%
# After 25 epochs the interval is 2**-25 wide.
print("estimate      ", res.estimate[0])
print("true minimiser", CUBIC_ARGMIN)
print("error         ", abs(res.estimate[0] - CUBIC_ARGMIN))
