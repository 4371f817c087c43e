"""Experiment runner: multi-seed runs, CSV traces, plain-text reports, CLI."""

from __future__ import annotations

import argparse
import re
import statistics
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import benchfns, xornet
from .core import RandomSource, Trace
from .ga import GaConfig, ga_optimize
from .gradopt import METHODS as GRAD_METHODS
from .gradopt import GradConfig, minimize
from .most import MostConfig, PrePartition, most_minimize

TASKS = ("bench", "xor", "figa")
OPTIMIZERS = ("most", "ga") + GRAD_METHODS

DEFAULT_SAMPLES = {"bench": 2000, "figa": 2000, "xor": 4000}
DEFAULT_EPOCHS = {"bench": 20, "figa": 20, "xor": 25}
DEFAULT_STEPS = {"bench": 5000, "figa": 5000, "xor": 50000}
# cross-entropy stop level for gradient training on XOR: -ln(1 - y) <= 0.01 caps every
# 0-target output below 1e-2 when training stops
DEFAULT_XOR_TOL = 0.01
DEFAULT_SUCCESS_TOL = {"schwefel": 1.0, "sphere": 1e-2, "cubic": 1e-5}
FIG_A_SUCCESS_VALUE = -2.9


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    optimizer: str = "most"
    function: str | None = None
    dim: int | None = None
    seeds: tuple[int, ...] = (1,)
    most: MostConfig | None = None
    grad: GradConfig | None = None
    ga: GaConfig = field(default_factory=GaConfig)
    steps: int | None = None
    tol: float | None = None
    targets: str = "paper"
    bound: float = xornet.WEIGHT_BOUND
    hidden: str | None = None
    loss: str | None = None
    success_tol: float | None = None
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        # None fields take the per-task defaults
        if self.task in TASKS:
            if self.most is None:
                object.__setattr__(self, "most", MostConfig(
                    DEFAULT_SAMPLES[self.task], DEFAULT_EPOCHS[self.task], width_threshold=0.0))
            if self.steps is None:
                object.__setattr__(self, "steps", DEFAULT_STEPS[self.task])
            if self.tol is None:
                object.__setattr__(self, "tol", DEFAULT_XOR_TOL if self.task == "xor" else 0.0)
        if self.grad is None:
            method = self.optimizer if self.optimizer in GRAD_METHODS else "adam"
            object.__setattr__(self, "grad", GradConfig(method))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        self.validate()

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; choose from {TASKS}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; choose from {OPTIMIZERS}")
        if self.is_gradient and self.grad.method != self.optimizer:
            raise ConfigError(f"grad.method {self.grad.method!r} disagrees with optimizer {self.optimizer!r}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if any(s < 0 for s in self.seeds):
            raise ConfigError("seeds must be non-negative")
        if self.task == "bench":
            if self.function is None:
                raise ConfigError("--function is required for the bench task")
            if self.function not in benchfns.BENCHMARKS:
                raise ConfigError(f"unknown function {self.function!r}; choose from {sorted(benchfns.BENCHMARKS)}")
        if self.is_gradient:
            if self.task == "figa" or (self.task == "bench" and not self.bench().differentiable):
                name = "fig-a" if self.task == "figa" else self.function
                raise ConfigError(f"--optimizer {self.optimizer} needs an analytic gradient, "
                                  f"which {name} does not provide; use most or ga")
        if self.targets not in ("paper", "standard"):
            raise ConfigError("--targets must be paper or standard")
        if self.steps < 0:
            raise ConfigError("--steps must be >= 0")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if self.task == "xor":
            self.net()

    @property
    def is_gradient(self) -> bool:
        return self.optimizer in GRAD_METHODS

    @property
    def label(self) -> str:
        return self.optimizer if self.task != "bench" else f"{self.optimizer}-{self.function}"

    def bench(self) -> benchfns.BenchSpec:
        name = "fig-a" if self.task == "figa" else self.function
        return benchfns.get_benchmark(name, self.dim)

    def net(self) -> xornet.NetConfig:
        base = xornet.GRADIENT_NET if self.is_gradient else xornet.BLACKBOX_NET
        try:
            return xornet.NetConfig(self.hidden or base.hidden_activation, self.loss or base.loss)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class SeedResult:
    seed: int
    ok: bool
    estimate: np.ndarray | None = None
    final_value: float = float("nan")
    iterations: int = 0
    seconds: float = 0.0
    success: bool = False
    outputs: np.ndarray | None = None
    zero_outputs: np.ndarray | None = None
    error: str = ""
    trace: Trace | None = None

    @property
    def max_zero_output(self) -> float:
        """Largest raw output on rows whose target is 0 (XOR runs only)."""
        return float("nan") if self.zero_outputs is None else float(np.max(self.zero_outputs))


def _run_seed(config: ExperimentConfig, seed: int) -> SeedResult:
    rng = RandomSource(seed)
    start = time.perf_counter()
    try:
        if config.task == "xor":
            res = _run_xor(config, rng)
        else:
            res = _run_bench(config, rng)
    except Exception as exc:  # any aborted run is reported, never raised
        return SeedResult(seed, False, error=f"{type(exc).__name__}: {exc}",
                          seconds=time.perf_counter() - start)
    res.seed = seed
    res.seconds = time.perf_counter() - start
    return res


def _optimize(config, objective, space, rng, value_and_grad=None, w0=None):
    """Dispatch to the configured optimiser; returns (estimate, value, iterations, trace)."""
    if config.optimizer == "most":
        r = most_minimize(objective, space, config.most, rng)
        return r.estimate, r.final_value, r.epochs_run, r.trace
    if config.optimizer == "ga":
        best, trace = ga_optimize(objective, space, config.ga, rng)
        return best.genes, best.fitness, trace[-1].step, trace
    every = max(1, config.steps // 1000)
    w, trace = minimize(value_and_grad, w0, config.grad, config.steps, config.tol, record_every=every)
    return w, trace[-1].value, trace[-1].step, trace


def _run_bench(config: ExperimentConfig, rng: RandomSource) -> SeedResult:
    spec = config.bench()
    objective = spec.objective()
    w0 = rng.uniform_box(spec.bounds.lows, spec.bounds.highs, 1)[0] if config.is_gradient else None
    est, value, iters, trace = _optimize(config, objective, spec.bounds, rng, spec.value_and_grad, w0)
    if config.task == "figa":
        tol = FIG_A_SUCCESS_VALUE if config.success_tol is None else config.success_tol
        success = value <= tol
    else:
        tol = DEFAULT_SUCCESS_TOL.get(spec.name, 1e-3) if config.success_tol is None else config.success_tol
        success = bool(np.max(np.abs(est - spec.optimum_point)) <= tol)
    return SeedResult(0, True, np.asarray(est), float(value), int(iters), success=success, trace=trace)


def _run_xor(config: ExperimentConfig, rng: RandomSource) -> SeedResult:
    data = xornet.xor_dataset(config.targets)
    net = config.net()
    space = xornet.weight_space(config.bound)
    objective = xornet.as_objective(data, net)
    w0 = xornet.initial_weights(rng) if config.is_gradient else None
    est, value, iters, trace = _optimize(config, objective, space, rng,
                                         xornet.value_and_grad(data, net), w0)
    y = xornet.outputs(est, data, net)
    return SeedResult(0, True, np.asarray(est), float(value), int(iters),
                      success=xornet.rounded_correct(est, data, net), outputs=y,
                      zero_outputs=y[data.zero_rows], trace=trace)


@dataclass
class Report:
    config: ExperimentConfig
    results: list[SeedResult]

    @property
    def ok_results(self) -> list[SeedResult]:
        return [r for r in self.results if r.ok]

    @property
    def aborted(self) -> int:
        return sum(not r.ok for r in self.results)

    @property
    def success_count(self) -> int:
        return sum(r.success for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.aborted == 0 else 1

    def stats(self, attr="final_value") -> dict[str, float]:
        vals = [getattr(r, attr) for r in self.ok_results]
        if not vals:
            return {"median": float("nan"), "min": float("nan"), "max": float("nan")}
        return {"median": statistics.median(vals), "min": min(vals), "max": max(vals)}

    def result_for(self, seed: int) -> SeedResult:
        return next(r for r in self.results if r.seed == seed)

    def to_text(self) -> str:
        c = self.config
        lines = [f"task={c.task} optimizer={c.optimizer}"
                 + (f" function={c.function}" if c.function else "")
                 + f" seeds={len(c.seeds)}",
                 "config: " + _config_echo(c), ""]
        xor = c.task == "xor"
        head = f"{'seed':>6} {'status':>7} {'final':>14} {'iters':>7} {'seconds':>9} {'ok':>3}  "
        head += "outputs" if xor else "estimate"
        lines += [head, "-" * len(head)]
        for r in self.results:
            if not r.ok:
                lines.append(f"{r.seed:>6} {'ABORTED':>7}  {r.error}")
                continue
            vec = r.outputs if xor else r.estimate
            shown = " ".join(f"{v:.6g}" for v in vec[:9])
            lines.append(f"{r.seed:>6} {'ok':>7} {r.final_value:>14.6g} {r.iterations:>7d} "
                         f"{r.seconds:>9.3f} {'y' if r.success else 'n':>3}  {shown}")
        s = self.stats()
        lines += ["", f"final value: median {s['median']:.6g}  min {s['min']:.6g}  max {s['max']:.6g}",
                  f"successes: {self.success_count}/{len(self.results)}  aborted: {self.aborted}"]
        if xor:
            z = self.stats("max_zero_output")
            lines.append(f"max 0-target output: median {z['median']:.3g}  min {z['min']:.3g}  max {z['max']:.3g}")
        return "\n".join(lines) + "\n"


def _config_echo(c: ExperimentConfig) -> str:
    if c.optimizer == "most":
        d = asdict(c.most)
    elif c.optimizer == "ga":
        d = asdict(c.ga)
    else:
        d = asdict(c.grad) | {"steps": c.steps, "tol": c.tol}
    if c.task == "xor":
        d |= {"targets": c.targets, "bound": c.bound} | asdict(c.net())
    return " ".join(f"{k}={v}" for k, v in d.items())


def run(config: ExperimentConfig) -> Report:
    """Run every seed independently; write traces and the report when ``out`` is set."""
    if config.jobs > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            results = list(pool.map(_run_seed, [config] * len(config.seeds), config.seeds))
    else:
        results = [_run_seed(config, s) for s in config.seeds]
    report = Report(config, results)
    if config.out:
        write_outputs(report, config.out)
    return report


def write_outputs(report: Report, prefix: str) -> list[Path]:
    c = report.config
    stem = f"{prefix}_{c.label}"
    Path(stem).parent.mkdir(parents=True, exist_ok=True)
    written = []
    for r in report.results:
        if r.ok and r.trace is not None:
            p = Path(f"{stem}_seed{r.seed}.csv")
            r.trace.write_csv(p)
            written.append(p)
    if c.task == "xor" and report.ok_results:
        p = Path(f"{stem}_weights.csv")
        xornet.write_weights_csv(p, [r.estimate for r in report.ok_results])
        written.append(p)
    p = Path(f"{stem}_report.txt")
    p.write_text(report.to_text(), encoding="utf-8")
    written.append(p)
    return written


@dataclass
class Comparison:
    reports: list[Report]

    @property
    def exit_code(self) -> int:
        return max((r.exit_code for r in self.reports), default=0)

    def report(self, optimizer: str) -> Report:
        return next(r for r in self.reports if r.config.optimizer == optimizer)

    def to_text(self) -> str:
        if len(self.reports) == 1:
            return self.reports[0].to_text()
        xor = self.reports[0].config.task == "xor"
        head = f"{'optimizer':<10} {'success':>8} {'median final':>14} {'median iters':>13} {'median s':>9}"
        if xor:
            head += f" {'median max0':>12}"
        lines = [f"comparison: task={self.reports[0].config.task}", "", head, "-" * len(head)]
        for rep in self.reports:
            s = rep.stats()
            it = rep.stats("iterations")["median"]
            sec = rep.stats("seconds")["median"]
            line = (f"{rep.config.optimizer:<10} {rep.success_count:>4}/{len(rep.results):<3} "
                    f"{s['median']:>14.6g} {it:>13.6g} {sec:>9.3f}")
            if xor:
                line += f" {rep.stats('max_zero_output')['median']:>12.3g}"
            lines.append(line)
        if xor:
            lines += ["", "max output on 0-target rows, per seed:"]
            lines.append(f"{'seed':>6} " + " ".join(f"{r.config.optimizer:>12}" for r in self.reports))
            for seed in self.reports[0].config.seeds:
                cells = []
                for rep in self.reports:
                    r = rep.result_for(seed)
                    cells.append(f"{r.max_zero_output:>12.3g}" if r.ok else f"{'ABORTED':>12}")
                lines.append(f"{seed:>6} " + " ".join(cells))
        lines.append("")
        for rep in self.reports:
            lines += [f"== {rep.config.optimizer} ==", rep.to_text()]
        return "\n".join(lines)


def compare(configs) -> Comparison:
    configs = list(configs)
    if not configs:
        raise ConfigError("compare needs at least one configuration")
    tasks = {(c.task, c.function if c.task == "bench" else None) for c in configs}
    if len(tasks) > 1:
        raise ConfigError(f"compare needs configurations of one task, got {sorted(map(str, tasks))}")
    comparison = Comparison([run(c) for c in configs])
    out = configs[0].out
    if out:
        Path(f"{out}_comparison.txt").write_text(comparison.to_text(), encoding="utf-8")
    return comparison


# --- command line -----------------------------------------------------------

def parse_seeds(text: str) -> tuple[int, ...]:
    """``"1..10"`` -> 1..10 inclusive; ``"1,4,7"`` and mixes such as ``"1..3,9"`` work too."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if b < a:
                raise argparse.ArgumentTypeError(f"empty seed range {part!r}")
            seeds.extend(range(a, b + 1))
        elif part.isdigit():
            seeds.append(int(part))
        else:
            raise argparse.ArgumentTypeError(f"bad seed spec {part!r}; use e.g. 1..10 or 1,2,3")
    return tuple(seeds)


def _pre_partition(text: str) -> PrePartition:
    try:
        k, keep = (int(v) for v in text.split(","))
        return PrePartition(k, keep)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--pre-partition wants K,KEEP with 1 <= KEEP <= K ({exc})")


def _add_common(p: argparse.ArgumentParser, optimizer_flag=True):
    if optimizer_flag:
        p.add_argument("--optimizer", default="most", choices=OPTIMIZERS, help="optimiser (default: most)")
    p.add_argument("--seeds", type=parse_seeds, default=(1,), help="seed list, e.g. 1..10 or 1,5,9 (default: 1)")
    p.add_argument("--out", metavar="PREFIX", help="write traces/report as PREFIX_<optimizer>_*.csv/txt")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes over seeds")
    p.add_argument("--success-tol", type=float, help="success threshold (distance to optimum; fig-a: value)")
    g = p.add_argument_group("MOST")
    g.add_argument("--samples", type=int, help="Monte Carlo samples per half (default 2000; xor 4000)")
    g.add_argument("--epochs", type=int, help="epoch budget (default 20; xor 25)")
    g.add_argument("--width-threshold", type=float, default=0.0,
                   help="stop once every width is <= this (default 0: run all epochs)")
    g.add_argument("--pre-partition", type=_pre_partition, metavar="K,KEEP",
                   help="slice each variable into K regions and run MOST on the KEEP best")
    g = p.add_argument_group("gradient methods")
    g.add_argument("--eta", type=float, default=0.001, help="learning rate (default 0.001; AdaDelta ignores it)")
    g.add_argument("--gamma", type=float, default=0.9, help="momentum / decay factor (default 0.9)")
    g.add_argument("--beta1", type=float, default=0.9, help="Adam first-moment decay (default 0.9)")
    g.add_argument("--beta2", type=float, default=0.999, help="Adam second-moment decay (default 0.999)")
    g.add_argument("--eps", type=float, default=1e-8, help="denominator guard (default 1e-8)")
    g.add_argument("--steps", type=int, help="update budget (default 5000; xor 50000)")
    g.add_argument("--tol", type=float, help="stop when loss <= tol (default 0; xor 0.01)")
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--population", type=int, default=100, help="population size (default 100)")
    g.add_argument("--generations", type=int, default=200, help="generation budget (default 200)")
    g.add_argument("--crossover-rate", type=float, default=0.9, help="BLX-0.5 probability per pair (default 0.9)")
    g.add_argument("--mutation-rate", type=float, help="per-gene probability (default 1/n)")
    g.add_argument("--mutation-scale", type=float, default=0.1, help="sigma as a fraction of the range")
    g.add_argument("--elitism", type=int, default=1, help="individuals copied unchanged (default 1)")
    g.add_argument("--init-value", type=float, default=0.05,
                   help="all genes of one seeded individual (default 0.05)")


def _add_xor(p):
    p.add_argument("--targets", choices=("paper", "standard"), default="paper",
                   help="paper (default): (0,0),(1,1)->1 and mixed->0, an XNOR table; standard: ordinary XOR")
    p.add_argument("--bound", type=float, default=xornet.WEIGHT_BOUND, help="weight box [-B, B] (default 50)")
    p.add_argument("--hidden", choices=xornet.HIDDEN_ACTIVATIONS,
                   help="hidden activation (default: relu for gradient methods, sigmoid otherwise)")
    p.add_argument("--loss", choices=xornet.LOSSES,
                   help="loss (default: cross_entropy for gradient methods, squared_error otherwise)")


def _add_bench(p, required=True):
    p.add_argument("--function", required=required, choices=sorted(benchfns.BENCHMARKS),
                   help="benchmark objective")
    p.add_argument("--dim", type=int, help="dimension (default 5; cubic and fig-a are 1-D)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mostopt", description="MOST optimiser experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("bench", help="optimise a benchmark function")
    _add_bench(p)
    _add_common(p)
    p = sub.add_parser("xor", help="train the 2-2-1 XOR network")
    _add_xor(p)
    _add_common(p)
    p = sub.add_parser("figa", help="deceptive step function, optionally with --pre-partition")
    _add_common(p)
    p = sub.add_parser("compare", help="run several optimisers on one task side by side")
    p.add_argument("--task", choices=TASKS, default="xor", help="task shared by every optimiser (default: xor)")
    p.add_argument("--optimizers", default="most,adam,ga", help="comma list (default: most,adam,ga)")
    _add_bench(p, required=False)
    _add_xor(p)
    _add_common(p, optimizer_flag=False)
    return parser


def _config_from_args(task: str, optimizer: str, args) -> ExperimentConfig:
    most = MostConfig(
        samples=args.samples or DEFAULT_SAMPLES[task],
        max_epochs=args.epochs or DEFAULT_EPOCHS[task],
        width_threshold=args.width_threshold,
        pre_partition=args.pre_partition,
    )
    grad = GradConfig(optimizer if optimizer in GRAD_METHODS else "adam",
                      args.eta, args.gamma, args.beta1, args.beta2, args.eps)
    ga = GaConfig(args.population, args.generations, args.crossover_rate, args.mutation_rate,
                  args.mutation_scale, args.elitism, args.init_value)
    tol = args.tol if args.tol is not None else (DEFAULT_XOR_TOL if task == "xor" else 0.0)
    return ExperimentConfig(
        task=task, optimizer=optimizer, function=getattr(args, "function", None),
        dim=getattr(args, "dim", None), seeds=args.seeds, most=most, grad=grad, ga=ga,
        steps=args.steps if args.steps is not None else DEFAULT_STEPS[task], tol=tol,
        targets=getattr(args, "targets", "paper"), bound=getattr(args, "bound", xornet.WEIGHT_BOUND),
        hidden=getattr(args, "hidden", None), loss=getattr(args, "loss", None),
        success_tol=args.success_tol, out=args.out, jobs=args.jobs,
    )


def parse_cli(argv=None):
    """Parse arguments into an :class:`ExperimentConfig` (a list of them for ``compare``).

    Invalid input exits through ``argparse`` with status 2 and a usage message.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compare":
            if args.task == "bench" and args.function is None:
                parser.error("--function is required for --task bench")
            names = [s.strip() for s in args.optimizers.split(",") if s.strip()]
            bad = [n for n in names if n not in OPTIMIZERS]
            if bad or not names:
                parser.error(f"--optimizers: unknown {bad}; choose from {OPTIMIZERS}")
            return [_config_from_args(args.task, n, args) for n in names]
        return _config_from_args(args.command, args.optimizer, args)
    except (ConfigError, ValueError) as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    parsed = parse_cli(argv)
    try:
        if isinstance(parsed, list):
            result = compare(parsed)
        else:
            result = run(parsed)
    except ConfigError as exc:
        print(f"mostopt: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    sys.stdout.write(result.to_text())
    return result.exit_code
