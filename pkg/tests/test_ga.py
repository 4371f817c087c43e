import numpy as np
import pytest

from mostopt import xornet
from mostopt.benchfns import get_benchmark
from mostopt.core import NonFiniteObjectiveError, Objective, RandomSource, SearchSpace
from mostopt.ga import GaConfig, Population, ga_generation, ga_optimize, initial_population

SPHERE = get_benchmark("sphere")


def _pop(cfg, seed=0, space=SPHERE.bounds, obj=None):
    obj = obj or SPHERE.objective()
    return initial_population(obj, space, cfg, RandomSource(seed)), obj


def test_initial_population_contains_seeded_individual():
    cfg = GaConfig(population_size=20)
    pop, _ = _pop(cfg)
    assert len(pop) == 20
    np.testing.assert_array_equal(pop.genes[0], 0.05)
    assert pop.fitness[0] == pytest.approx(5 * 0.05**2)
    assert all(SPHERE.bounds.contains(g) for g in pop.genes)
    pop, _ = _pop(GaConfig(population_size=20, init_value=None))
    assert not np.all(pop.genes[0] == 0.05)


def test_constant_objective_fitness_stays_constant():
    obj = Objective(lambda x: 7.0, 3, batch=lambda X: np.full(len(X), 7.0))
    best, trace = ga_optimize(obj, SearchSpace.box(-1, 1, 3), GaConfig(population_size=10, generations=5))
    assert best.fitness == 7.0
    assert all(v == 7.0 for v in trace.values)


def test_full_elitism_keeps_population():
    cfg = GaConfig(population_size=12, elitism_count=12)
    pop, obj = _pop(cfg)
    nxt = ga_generation(pop, obj, SPHERE.bounds, cfg, RandomSource(1))
    s = pop.sorted()
    np.testing.assert_array_equal(nxt.genes, s.genes)
    np.testing.assert_array_equal(nxt.fitness, s.fitness)


def test_no_variation_children_copy_parents():
    cfg = GaConfig(population_size=16, crossover_rate=0.0, mutation_rate=0.0)
    pop, obj = _pop(cfg)
    nxt = ga_generation(pop, obj, SPHERE.bounds, cfg, RandomSource(1))
    parents = {tuple(g) for g in pop.genes}
    assert all(tuple(g) in parents for g in nxt.genes)
    # fitness reused, not recomputed
    np.testing.assert_array_equal(nxt.fitness, obj.batch(nxt.genes))


def test_selection_pressure_favours_fitter_parents():
    cfg = GaConfig(population_size=40, crossover_rate=0.0, mutation_rate=0.0, elitism_count=0)
    pop, obj = _pop(cfg)
    nxt = ga_generation(pop, obj, SPHERE.bounds, cfg, RandomSource(2))
    assert np.mean(nxt.fitness) < np.mean(pop.fitness)


@pytest.mark.parametrize("seed", range(3))
def test_best_fitness_monotone_and_bounds_kept(seed):
    space = get_benchmark("schwefel").bounds
    obj = get_benchmark("schwefel").objective()
    cfg = GaConfig(population_size=30, generations=40, mutation_scale=0.5)
    pop = initial_population(obj, space, cfg, RandomSource(seed))
    rng = RandomSource(seed + 100)
    best = pop.fitness.min()
    for _ in range(40):
        pop = ga_generation(pop, obj, space, cfg, rng)
        assert len(pop) == 30
        assert np.all(pop.genes >= space.lows) and np.all(pop.genes <= space.highs)
        assert pop.fitness.min() <= best  # elitism
        best = pop.fitness.min()
        np.testing.assert_allclose(pop.fitness, obj.batch(pop.genes))


def test_trace_is_non_increasing():
    _, trace = ga_optimize(SPHERE.objective(), SPHERE.bounds, GaConfig(population_size=20, generations=30))
    vals = trace.values
    assert len(trace) == 31 and trace[0].step == 0
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_deterministic_for_seed():
    cfg = GaConfig(population_size=20, generations=20)
    a, ta = ga_optimize(SPHERE.objective(), SPHERE.bounds, cfg, RandomSource(9))
    b, tb = ga_optimize(SPHERE.objective(), SPHERE.bounds, cfg, RandomSource(9))
    np.testing.assert_array_equal(a.genes, b.genes)
    assert np.array_equal(ta.values, tb.values)


def test_sphere_converges():
    best, _ = ga_optimize(SPHERE.objective(), SPHERE.bounds, GaConfig(), RandomSource(1))
    assert best.fitness < 1e-2


@pytest.mark.parametrize("kw", [dict(population_size=1), dict(generations=-1), dict(crossover_rate=1.5),
                                dict(mutation_rate=-0.1), dict(mutation_scale=-1), dict(elitism_count=101)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        GaConfig(**kw)


def test_mutation_rate_default():
    assert GaConfig().mutation_rate_for(9) == pytest.approx(1 / 9)
    assert GaConfig(mutation_rate=0.3).mutation_rate_for(9) == 0.3


def test_nonfinite_fitness_aborts():
    obj = Objective(lambda x: float("nan"), 2)
    with pytest.raises(NonFiniteObjectiveError):
        ga_optimize(obj, SearchSpace.box(0, 1, 2), GaConfig(population_size=4, generations=1))


def test_population_best_and_sorted():
    p = Population(np.array([[1.0], [2.0], [3.0]]), np.array([3.0, 1.0, 2.0]))
    assert p.best().fitness == 1.0 and p.best().genes[0] == 2.0
    np.testing.assert_array_equal(p.sorted().fitness, [1, 2, 3])


@pytest.mark.slow
def test_xor_solved_in_most_seeds():
    data = xornet.xor_dataset()
    obj = xornet.as_objective(data, xornet.BLACKBOX_NET)
    wins = 0
    for seed in range(1, 11):
        best, _ = ga_optimize(obj, xornet.weight_space(), GaConfig(), RandomSource(seed))
        wins += xornet.rounded_correct(best.genes, data, xornet.BLACKBOX_NET)
    assert wins >= 7
