"""Test objectives: a 1-D cubic, Schwefel, Sphere and a deceptive step function.

All functions are vectorised over the last axis: a single point of shape (n,)
gives a scalar, a batch of shape (k, n) gives k values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Interval, Objective, SearchSpace

SCHWEFEL_ARGMIN = 420.96874878568275
SCHWEFEL_MIN_PER_COORD = -418.98288727243295
CUBIC_ARGMIN = (5 + np.sqrt(13)) / 12


def cubic1d(x):
    """2x^3 - 5/2 x^2 + 1/2 x + 1/2; local minimum at (5 + sqrt 13)/12 on [0, 1]."""
    x = np.asarray(x, dtype=float)
    return 2 * x**3 - 2.5 * x**2 + 0.5 * x + 0.5


def cubic1d_grad(x):
    x = np.asarray(x, dtype=float)
    return 6 * x**2 - 5 * x + 0.5


def schwefel(x):
    x = np.asarray(x, dtype=float)
    return -np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def sphere(x, negated: bool = False):
    """Sum of squares.

    ``negated=True`` returns the negated sum, whose minimum on [-1, 1]^n sits
    at the corners rather than at the origin. It exists only for comparison.
    """
    x = np.asarray(x, dtype=float)
    s = np.sum(x * x, axis=-1)
    return -s if negated else s


def sphere_grad(x):
    return 2 * np.asarray(x, dtype=float)


# fig_a_deceptive: a narrow deep well in the left half, a broad shallow floor on
# the right. Left-half integral -0.12 > right-half integral -0.25.
FIG_A_WELL = (0.10, 0.14)
FIG_A_WELL_DEPTH = -3.0
FIG_A_FLOOR = -0.5


def fig_a_deceptive(x):
    x = np.asarray(x, dtype=float)
    in_well = (x >= FIG_A_WELL[0]) & (x <= FIG_A_WELL[1])
    return np.where(x >= 0.5, FIG_A_FLOOR, np.where(in_well, FIG_A_WELL_DEPTH, 0.0))


@dataclass(frozen=True)
class BenchSpec:
    name: str
    dimension: int
    bounds: SearchSpace
    optimum_point: np.ndarray
    optimum_value: float
    func: Callable
    grad: Callable | None = None

    def objective(self) -> Objective:
        if self.dimension == 1:
            f = self.func
            return Objective(lambda p: float(f(p[0])), 1,
                             batch=lambda X: f(X[:, 0]), name=self.name)
        return Objective(self.func, self.dimension, batch=self.func, name=self.name)

    def gradient(self, x) -> np.ndarray:
        if self.grad is None:
            raise ValueError(f"no analytic gradient for {self.name}")
        x = np.asarray(x, dtype=float)
        if self.dimension == 1:
            return np.atleast_1d(self.grad(x[0]))
        return self.grad(x)

    def value_and_grad(self, x):
        obj = self.objective()
        return obj(x), self.gradient(x)

    @property
    def differentiable(self) -> bool:
        return self.grad is not None


def _cubic(dim=1):
    if dim != 1:
        raise ValueError("cubic is one-dimensional")
    return BenchSpec("cubic", 1, SearchSpace((Interval(0, 1),)), np.array([CUBIC_ARGMIN]),
                     float(cubic1d(CUBIC_ARGMIN)), cubic1d, cubic1d_grad)


def _schwefel(dim=5):
    return BenchSpec("schwefel", dim, SearchSpace.box(-500, 500, dim),
                     np.full(dim, SCHWEFEL_ARGMIN), dim * SCHWEFEL_MIN_PER_COORD, schwefel)


def _sphere(dim=5):
    return BenchSpec("sphere", dim, SearchSpace.box(-1, 1, dim), np.zeros(dim), 0.0,
                     sphere, sphere_grad)


def _fig_a(dim=1):
    if dim != 1:
        raise ValueError("fig-a is one-dimensional")
    centre = sum(FIG_A_WELL) / 2
    return BenchSpec("fig-a", 1, SearchSpace((Interval(0, 1),)), np.array([centre]),
                     FIG_A_WELL_DEPTH, fig_a_deceptive)


BENCHMARKS: dict[str, Callable[..., BenchSpec]] = {
    "cubic": _cubic,
    "schwefel": _schwefel,
    "sphere": _sphere,
    "fig-a": _fig_a,
}

DEFAULT_DIMS = {"cubic": 1, "schwefel": 5, "sphere": 5, "fig-a": 1}


def get_benchmark(name: str, dim: int | None = None) -> BenchSpec:
    try:
        factory = BENCHMARKS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None
    return factory(DEFAULT_DIMS[name] if dim is None else dim)
