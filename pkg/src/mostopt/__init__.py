"""Monte Carlo stochastic optimisation (MOST) and the baselines it is compared with.

MOST minimises a black-box function over a box by halving one variable's
interval at a time, keeping whichever half has the smaller Monte Carlo sum of
the objective. Twenty epochs shrink every interval below 1e-6 of its start.

    >>> from mostopt import MostConfig, RandomSource, most_optimize
    >>> from mostopt.benchfns import get_benchmark
    >>> spec = get_benchmark("sphere", 5)
    >>> res = most_optimize(spec.objective(), spec.bounds, MostConfig(samples=2000), RandomSource(1))
    >>> bool(abs(res.estimate).max() < 2e-6)
    True

Baselines: the gradient rules in :mod:`mostopt.gradopt`, the genetic algorithm
in :mod:`mostopt.ga`; the XOR network lives in :mod:`mostopt.xornet` and the
experiment runner/CLI in :mod:`mostopt.harness` (``python -m mostopt``).
"""

from .core import (
    Interval,
    NonFiniteObjectiveError,
    Objective,
    RandomSource,
    SearchSpace,
    Trace,
    TraceRecord,
    midpoint,
    sample_uniform,
    split,
)
from .ga import GaConfig, Individual, Population, ga_generation, ga_optimize
from .gradopt import GradConfig, GradState, adam_step, baseline_step, minimize
from .most import (
    MostConfig,
    MostResult,
    MostState,
    PrePartition,
    mc_sum,
    most_epoch,
    most_minimize,
    most_optimize,
    pre_partition,
)

__version__ = "0.1.0"
