"""
A deceptive step function
=========================

A deep narrow well at [0.10, 0.14] sits in the half with the larger average,
so plain bisection walks away from it on the first split. Slicing the box into
ten regions first and refining the two best recovers it.
"""

from mostopt import MostConfig, PrePartition, RandomSource, most_minimize, most_optimize
from mostopt.benchfns import get_benchmark

spec = get_benchmark("fig-a")
obj = spec.objective()

plain = MostConfig(samples=2000, max_epochs=20, width_threshold=0.0)
parted = MostConfig(samples=2000, max_epochs=20, width_threshold=0.0, pre_partition=PrePartition(10, 2))

for seed in range(1, 6):
    a = most_optimize(obj, spec.bounds, plain, RandomSource(seed))
    b = most_minimize(obj, spec.bounds, parted, RandomSource(seed))
    print(f"seed {seed}: plain x={a.estimate[0]:.4f} f={a.final_value:+.2f}   "
          f"pre-partitioned x={b.estimate[0]:.4f} f={b.final_value:+.2f}")

# %%
# The candidates are kept on the result for inspection.
for c in b.candidates:
    print("candidate box", c.trace[0].estimate[0] - c.trace[0].widths[0] / 2, "->", c.estimate[0])
