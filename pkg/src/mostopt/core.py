"""Shared value types: intervals, search boxes, seeded randomness, objectives, traces."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class NonFiniteObjectiveError(ArithmeticError):
    """Raised when an objective returns NaN or +-inf somewhere inside its domain."""

    def __init__(self, point, value):
        self.point = tuple(float(v) for v in np.ravel(point))
        self.value = float(value)
        super().__init__(f"objective returned {self.value!r} at point {self.point!r}")


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"interval bounds must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        return midpoint(self)

    def split(self) -> tuple[Interval, Interval]:
        return split(self)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def slices(self, count: int) -> list[Interval]:
        """Cut into ``count`` equal consecutive pieces sharing endpoints exactly."""
        if count < 1:
            raise ValueError("count must be >= 1")
        edges = [self.lo + self.width() * k / count for k in range(count)] + [self.hi]
        return [Interval(a, b) for a, b in zip(edges[:-1], edges[1:])]


def midpoint(interval: Interval) -> float:
    # lo + w/2 rather than (lo + hi)/2: no overflow and symmetric rounding on wide bounds
    return interval.lo + (interval.hi - interval.lo) / 2


def split(interval: Interval) -> tuple[Interval, Interval]:
    mid = midpoint(interval)
    return Interval(interval.lo, mid), Interval(mid, interval.hi)


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box: one closed interval per decision variable."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(self.intervals)
        if len(ivs) < 1:
            raise ValueError("a search space needs at least one variable")
        if not all(isinstance(iv, Interval) for iv in ivs):
            raise TypeError("intervals must be Interval instances")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def box(cls, lo: float, hi: float, dim: int) -> SearchSpace:
        return cls(tuple(Interval(lo, hi) for _ in range(dim)))

    @classmethod
    def from_bounds(cls, lows: Sequence[float], highs: Sequence[float]) -> SearchSpace:
        if len(lows) != len(highs):
            raise ValueError("lows and highs differ in length")
        return cls(tuple(Interval(a, b) for a, b in zip(lows, highs)))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, j: int) -> Interval:
        return self.intervals[j]

    @property
    def lows(self) -> np.ndarray:
        return np.array([iv.lo for iv in self.intervals])

    @property
    def highs(self) -> np.ndarray:
        return np.array([iv.hi for iv in self.intervals])

    def widths(self) -> np.ndarray:
        return np.array([iv.width() for iv in self.intervals])

    def midpoints(self) -> np.ndarray:
        return np.array([midpoint(iv) for iv in self.intervals])

    def replace(self, j: int, interval: Interval) -> SearchSpace:
        ivs = list(self.intervals)
        ivs[j] = interval
        return SearchSpace(tuple(ivs))

    def contains(self, point: Sequence[float]) -> bool:
        p = np.asarray(point, dtype=float)
        return p.shape == (self.dim,) and bool(np.all((self.lows <= p) & (p <= self.highs)))

    def contains_space(self, other: SearchSpace) -> bool:
        return other.dim == self.dim and all(
            a.lo <= b.lo and b.hi <= a.hi for a, b in zip(self.intervals, other.intervals)
        )

    def clip(self, points: np.ndarray) -> np.ndarray:
        return np.clip(points, self.lows, self.highs)


class RandomSource:
    """Seeded PCG64 stream. Equal seeds give bit-identical draw sequences."""

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
            self.seed = int(seed.entropy) if isinstance(seed.entropy, int) else None
        else:
            if int(seed) < 0:
                raise ValueError("seed must be a non-negative integer")
            self.seed = int(seed)
            self._seq = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def __repr__(self):
        return f"RandomSource(seed={self.seed})"

    def spawn(self, count: int) -> list[RandomSource]:
        """Independent child streams, derived deterministically from this one."""
        return [RandomSource(s) for s in self._seq.spawn(count)]

    def uniform(self, lo, hi, size=None):
        # Generator.uniform draws on [lo, hi); the clip guards the hi endpoint against
        # the lo + (hi - lo) * u rounding up past hi.
        return np.clip(self.generator.uniform(lo, hi, size), lo, hi)

    def uniform_box(self, lows: np.ndarray, highs: np.ndarray, count: int) -> np.ndarray:
        """``count`` points drawn uniformly from the box, shape (count, dim)."""
        return self.uniform(lows, highs, (count, len(lows)))

    def random(self, size=None):
        return self.generator.random(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)


def sample_uniform(rng: RandomSource, interval: Interval) -> float:
    return float(rng.uniform(interval.lo, interval.hi))


class Objective:
    """A function to minimise, with an optional vectorised form.

    ``func`` maps a 1-D point of length ``dim`` to a real. ``batch``, if given,
    maps an array of shape (k, dim) to k values and must agree with ``func``
    row by row; it is what the Monte Carlo sums use.
    """

    def __init__(self, func: Callable, dim: int, batch: Callable | None = None, name: str = ""):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.func = func
        self.dim = int(dim)
        self._batch = batch
        self.name = name or getattr(func, "__name__", "objective")

    def __repr__(self):
        return f"Objective({self.name!r}, dim={self.dim})"

    def __call__(self, point) -> float:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected point of shape ({self.dim},), got {p.shape}")
        return float(self.func(p))

    def batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise ValueError(f"{self.name}: expected points of shape (k, {self.dim}), got {points.shape}")
        if self._batch is not None:
            return np.asarray(self._batch(points), dtype=float).reshape(len(points))
        return np.array([self.func(p) for p in points], dtype=float)

    def evaluate_checked(self, points: np.ndarray) -> np.ndarray:
        """Like :meth:`batch` but raises :class:`NonFiniteObjectiveError` on NaN/inf."""
        values = self.batch(points)
        bad = ~np.isfinite(values)
        if bad.any():
            i = int(np.argmax(bad))
            raise NonFiniteObjectiveError(points[i], values[i])
        return values


def as_objective(f, dim: int | None = None) -> Objective:
    if isinstance(f, Objective):
        return f
    if dim is None:
        raise ValueError("dim is required when wrapping a plain callable")
    return Objective(f, dim)


@dataclass(frozen=True)
class TraceRecord:
    step: int
    estimate: tuple[float, ...]
    value: float
    widths: tuple[float, ...]
    seconds: float


@dataclass
class Trace:
    """Per-step history of an optimisation run."""

    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def append(self, step: int, estimate, value: float, widths, seconds: float) -> TraceRecord:
        if self.records and step <= self.records[-1].step:
            raise ValueError(f"trace steps must increase: {step} after {self.records[-1].step}")
        rec = TraceRecord(
            int(step),
            tuple(float(v) for v in np.ravel(estimate)),
            float(value),
            tuple(float(v) for v in np.ravel(widths)),
            float(seconds),
        )
        self.records.append(rec)
        return rec

    def copy(self) -> Trace:
        return Trace(list(self.records))

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.records], dtype=int)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    @property
    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.records])

    @property
    def widths(self) -> np.ndarray:
        return np.array([r.widths for r in self.records])

    def header(self) -> list[str]:
        n = len(self.records[0].estimate) if self.records else 0
        return (["step"] + [f"x{i + 1}" for i in range(n)] + ["f"]
                + [f"w{i + 1}" for i in range(n)] + ["seconds"])

    def write_csv(self, dest) -> None:
        """Write to a path or an open text stream."""
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(self.header())
        for r in self.records:
            w.writerow([r.step] + [_fmt(v) for v in r.estimate] + [_fmt(r.value)]
                       + [_fmt(v) for v in r.widths] + [_fmt(r.seconds)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, src) -> Trace:
        if isinstance(src, (str, os.PathLike)) and os.path.exists(src):
            with open(src, newline="", encoding="utf-8") as fh:
                return cls.read_csv(fh)
        if isinstance(src, str):
            src = io.StringIO(src)
        rows = list(csv.reader(src))
        if not rows:
            return cls()
        header = rows[0]
        n = sum(1 for h in header if h.startswith("x"))
        if header != ["step"] + [f"x{i + 1}" for i in range(n)] + ["f"] + [f"w{i + 1}" for i in range(n)] + ["seconds"]:
            raise ValueError(f"not a trace header: {header}")
        trace = cls()
        for row in rows[1:]:
            vals = [float(v) for v in row[1:]]
            trace.append(int(row[0]), vals[:n], vals[n], vals[n + 1:2 * n + 1], vals[-1])
        return trace


def _fmt(v: float) -> str:
    # 17 significant digits round-trips every float64 exactly
    return format(float(v), ".17g")


def bounds_array(space: SearchSpace | Iterable[Interval]) -> tuple[np.ndarray, np.ndarray]:
    ivs = space.intervals if isinstance(space, SearchSpace) else tuple(space)
    return np.array([iv.lo for iv in ivs]), np.array([iv.hi for iv in ivs])
