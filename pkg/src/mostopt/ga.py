"""Real-coded genetic algorithm with neighbourhood crossover.

One generation:

1. sort the population by fitness (lower is better);
2. keep the ``elitism_count`` best unchanged;
3. fill the rest by binary tournament, re-sort the mating pool by fitness and
   pair neighbours (1st with 2nd, 3rd with 4th, ...);
4. each pair undergoes BLX-0.5 crossover with probability ``crossover_rate``;
5. each gene mutates with probability ``mutation_rate`` by a Gaussian step of
   ``mutation_scale`` times the variable's range;
6. children are clamped to the bounds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import Objective, RandomSource, SearchSpace, Trace, as_objective

BLX_ALPHA = 0.5
TOURNAMENT_SIZE = 2


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1/n
    mutation_scale: float = 0.1
    elitism_count: int = 1
    init_value: float | None = 0.05

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            r = getattr(self, name)
            if r is not None and not 0 <= r <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_scale < 0:
            raise ValueError("mutation_scale must be >= 0")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ValueError("elitism_count must lie in [0, population_size]")

    def mutation_rate_for(self, n: int) -> float:
        return 1.0 / n if self.mutation_rate is None else self.mutation_rate


@dataclass(frozen=True)
class Individual:
    genes: np.ndarray
    fitness: float


@dataclass
class Population:
    genes: np.ndarray  # (size, n)
    fitness: np.ndarray  # (size,)

    def __len__(self):
        return len(self.fitness)

    def best(self) -> Individual:
        i = int(np.argmin(self.fitness))
        return Individual(self.genes[i].copy(), float(self.fitness[i]))

    def sorted(self) -> Population:
        order = np.argsort(self.fitness, kind="stable")
        return Population(self.genes[order], self.fitness[order])


def initial_population(objective: Objective, space: SearchSpace, cfg: GaConfig,
                       rng: RandomSource) -> Population:
    genes = rng.uniform_box(space.lows, space.highs, cfg.population_size)
    if cfg.init_value is not None:
        genes[0] = space.clip(np.full(space.dim, cfg.init_value))
    return Population(genes, objective.evaluate_checked(genes))


def _blend(a, b, rng):
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    spread = BLX_ALPHA * (hi - lo)
    return rng.uniform(lo - spread, hi + spread), rng.uniform(lo - spread, hi + spread)


def ga_generation(population: Population, objective: Objective, space: SearchSpace,
                  cfg: GaConfig, rng: RandomSource) -> Population:
    pop = population.sorted()
    size, n = pop.genes.shape
    n_children = size - cfg.elitism_count
    if n_children == 0:
        return pop
    # sorted population: the smaller index of a tournament is the fitter entrant
    picks = np.sort(rng.integers(0, size, (n_children, TOURNAMENT_SIZE)).min(axis=1))
    pool = pop.genes[picks].copy()
    for i in range(0, n_children - 1, 2):
        if rng.random() < cfg.crossover_rate:
            pool[i], pool[i + 1] = _blend(pool[i], pool[i + 1], rng)
    mutate = rng.random(pool.shape) < cfg.mutation_rate_for(n)
    if mutate.any():
        steps = rng.normal(0.0, 1.0, pool.shape) * cfg.mutation_scale * space.widths()
        pool = np.where(mutate, pool + steps, pool)
    pool = space.clip(pool)
    changed = np.any(pool != pop.genes[picks], axis=1)
    fitness = pop.fitness[picks].copy()
    if changed.any():
        fitness[changed] = objective.evaluate_checked(pool[changed])
    elite = slice(0, cfg.elitism_count)
    return Population(np.concatenate([pop.genes[elite], pool]),
                      np.concatenate([pop.fitness[elite], fitness]))


def ga_optimize(objective, space: SearchSpace, cfg: GaConfig | None = None,
                rng: RandomSource | None = None):
    """Return the best individual ever seen and a per-generation trace.

    Trace step g holds the best-so-far genes and fitness after generation g
    (step 0 is the initial population); widths are the population's spread
    per gene.
    """
    cfg = cfg or GaConfig()
    rng = rng if rng is not None else RandomSource(0)
    objective = as_objective(objective, space.dim)
    start = time.perf_counter()
    pop = initial_population(objective, space, cfg, rng)
    best = pop.best()
    trace = Trace()
    trace.append(0, best.genes, best.fitness, np.ptp(pop.genes, axis=0), 0.0)
    for g in range(1, cfg.generations + 1):
        pop = ga_generation(pop, objective, space, cfg, rng)
        cand = pop.best()
        if cand.fitness < best.fitness:
            best = cand
        trace.append(g, best.genes, best.fitness, np.ptp(pop.genes, axis=0),
                     time.perf_counter() - start)
    return best, trace
