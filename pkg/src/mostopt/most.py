"""Monte Carlo stochastic optimisation (MOST).

Each epoch visits the variables in order. The current interval of the visited
variable is cut in half, the objective is summed over ``samples`` uniform
points drawn with that variable restricted to each half, and the half with the
smaller sum becomes the variable's new interval. Every epoch therefore halves
every width, whatever the objective does.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import (
    Interval,
    Objective,
    RandomSource,
    SearchSpace,
    Trace,
    as_objective,
    bounds_array,
    split,
)

RELATIVE_WIDTH_THRESHOLD = 1e-6


@dataclass(frozen=True)
class PrePartition:
    region_count: int = 10
    keep_count: int = 2

    def __post_init__(self):
        if self.region_count < 1:
            raise ValueError("region_count must be >= 1")
        if not 1 <= self.keep_count <= self.region_count:
            raise ValueError("keep_count must lie in [1, region_count]")


@dataclass(frozen=True)
class MostConfig:
    """Run settings.

    ``width_threshold=None`` means 1e-6 times the widest initial interval.
    Pass 0.0 to run exactly ``max_epochs`` epochs.
    """

    samples: int = 2000
    max_epochs: int = 20
    width_threshold: float | None = None
    pre_partition: PrePartition | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.width_threshold is not None and not self.width_threshold >= 0:
            raise ValueError("width_threshold must be >= 0")

    def threshold_for(self, space: SearchSpace) -> float:
        if self.width_threshold is not None:
            return float(self.width_threshold)
        return RELATIVE_WIDTH_THRESHOLD * float(space.widths().max())


@dataclass
class MostState:
    current: SearchSpace
    epoch: int = 0
    trace: Trace = field(default_factory=Trace)
    started: float = field(default_factory=time.perf_counter)

    @classmethod
    def start(cls, objective: Objective, space: SearchSpace) -> MostState:
        state = cls(space)
        state.trace.append(0, space.midpoints(), objective(space.midpoints()), space.widths(), 0.0)
        return state


@dataclass
class MostResult:
    estimate: np.ndarray
    final_value: float
    epochs_run: int
    trace: Trace
    space: SearchSpace
    # filled by most_minimize when pre-partitioning: one result per candidate box
    candidates: list[MostResult] = field(default_factory=list)


def mc_sum(objective: Objective, regions: SearchSpace | Sequence[Interval], samples: int,
           rng: RandomSource) -> float:
    """Unnormalised Monte Carlo sum of ``objective`` over ``samples`` uniform points.

    Both halves compared by MOST share the sample count and the region volume,
    so the volume/``samples`` factor of a true integral estimate is dropped.
    """
    lows, highs = bounds_array(regions)
    if len(lows) != objective.dim:
        raise ValueError(f"{len(lows)} regions for a {objective.dim}-dimensional objective")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    points = rng.uniform_box(lows, highs, samples)
    return float(np.sum(objective.evaluate_checked(points)))


def _half_sums(objective: Objective, space: SearchSpace, j: int, halves: Sequence[Interval],
               samples: int, rng: RandomSource) -> list[float]:
    # The other variables use one shared block of draws for every half, so the
    # comparison only sees the effect of variable j. Variable j gets fresh draws
    # inside each half.
    shared = rng.uniform_box(space.lows, space.highs, samples)
    sums = []
    for half in halves:
        points = shared.copy()
        points[:, j] = rng.uniform(half.lo, half.hi, samples)
        sums.append(float(np.sum(objective.evaluate_checked(points))))
    return sums


def most_epoch(objective: Objective, state: MostState, config: MostConfig,
               rng: RandomSource) -> MostState:
    """One sequential pass of bisections over all variables."""
    if state.current.dim != objective.dim:
        raise ValueError("objective dimension does not match the search space")
    space = state.current
    for j in range(space.dim):
        lower, upper = split(space[j])
        s_lower, s_upper = _half_sums(objective, space, j, (lower, upper), config.samples, rng)
        # ties keep the lower half
        space = space.replace(j, lower if s_lower <= s_upper else upper)
    estimate = space.midpoints()
    epoch = state.epoch + 1
    state.trace.append(epoch, estimate, objective(estimate), space.widths(),
                       time.perf_counter() - state.started)
    return MostState(space, epoch, state.trace, state.started)


def most_optimize(objective, space: SearchSpace, config: MostConfig | None = None,
                  rng: RandomSource | None = None) -> MostResult:
    """Run epochs until ``max_epochs`` or until every width is at most the threshold.

    ``config.pre_partition`` is ignored here; see :func:`most_minimize`.
    """
    config = config or MostConfig()
    rng = rng if rng is not None else RandomSource(0)
    objective = as_objective(objective, space.dim)
    threshold = config.threshold_for(space)
    state = MostState.start(objective, space)
    while state.epoch < config.max_epochs and not np.all(state.current.widths() <= threshold):
        state = most_epoch(objective, state, config, rng)
    estimate = state.current.midpoints()
    return MostResult(estimate, objective(estimate), state.epoch, state.trace, state.current)


def pre_partition(objective, space: SearchSpace, config: MostConfig,
                  rng: RandomSource) -> list[SearchSpace]:
    """Candidate boxes for deceptive objectives.

    Each variable's interval is cut into ``region_count`` slices and every slice
    is scored by a Monte Carlo sum with the other variables spread over their
    full intervals. Candidate k takes the k-th best slice of every variable at
    once, so the cost grows with n rather than with region_count**n.
    """
    if config.pre_partition is None:
        raise ValueError("config.pre_partition is not set")
    objective = as_objective(objective, space.dim)
    pp = config.pre_partition
    ranked: list[list[Interval]] = []
    for j in range(space.dim):
        slices = space[j].slices(pp.region_count)
        scores = _half_sums(objective, space, j, slices, config.samples, rng)
        order = np.argsort(scores, kind="stable")
        ranked.append([slices[i] for i in order])
    return [SearchSpace(tuple(r[k] for r in ranked)) for k in range(pp.keep_count)]


def most_minimize(objective, space: SearchSpace, config: MostConfig | None = None,
                  rng: RandomSource | None = None) -> MostResult:
    """MOST with the optional pre-partition step.

    Without ``config.pre_partition`` this is :func:`most_optimize`. With it, each
    candidate box is optimised on its own child stream and the lowest final
    value wins (earliest candidate on ties).
    """
    config = config or MostConfig()
    rng = rng if rng is not None else RandomSource(0)
    objective = as_objective(objective, space.dim)
    if config.pre_partition is None:
        return most_optimize(objective, space, config, rng)
    candidates = pre_partition(objective, space, config, rng)
    # thresholds stay relative to the original box, not to each slice
    inner = replace(config, pre_partition=None, width_threshold=config.threshold_for(space))
    results = [most_optimize(objective, box, inner, child)
               for box, child in zip(candidates, rng.spawn(len(candidates)))]
    best = min(range(len(results)), key=lambda i: (results[i].final_value, i))
    winner = results[best]
    return MostResult(winner.estimate, winner.final_value, winner.epochs_run, winner.trace,
                      winner.space, candidates=results)
