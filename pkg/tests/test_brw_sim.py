import math

import numpy as np
import pytest

from brw_obstacles import EnvironmentSpec, ObstacleField, make_field
from brw_obstacles import brw_sim, exact_dp
from brw_obstacles.brw_sim import Population, run_replica, step
from brw_obstacles.rng import make_stream


def test_empty_population_stays_empty(law, field1, stream):
    pop = Population(3, np.zeros((0, 1), dtype=np.int64))
    nxt = step(pop, field1, law, stream)
    assert nxt.size == 0 and nxt.generation == 4


def test_obstacle_step_keeps_one_particle(law, stream):
    f = ObstacleField.all_obstacles(2)
    pop = Population.founder(2)
    for _ in range(50):
        pop = step(pop, f, law, stream)
        assert pop.size == 1
    assert pop.generation == 50


def test_step_moves_to_neighbours(law, flat1, stream):
    pop = Population.founder(1, (10,))
    pop = step(pop, flat1, law, stream)
    assert set(pop.positions[:, 0].tolist()) <= {9, 11}


def test_step_zero_or_two(law, flat1):
    s = make_stream(8)
    sizes = np.array([step(Population.founder(1), flat1, law, s).size for _ in range(100_000)])
    assert set(np.unique(sizes)) <= {0, 2}
    frac = np.mean(sizes == 2)
    assert abs(frac - 0.5) < 3 * math.sqrt(0.25 / sizes.size)


def test_run_replica_n0(law, field1, stream):
    out = run_replica(field1, law, 0, stream)
    assert out.survived and out.final_size == 1 and not out.truncated


def test_survival_n1_n2_flat(law, flat1):
    reps = 100_000
    for n, target in ((1, 0.5), (2, 0.375)):
        e = brw_sim.estimate_survival_mc(flat1, law, n, reps, 11)
        assert abs(e.estimate - target) <= 3 * math.sqrt(target * (1 - target) / reps)


def test_estimate_n0(law, field1):
    e = brw_sim.estimate_survival_mc(field1, law, 0, 100, 1)
    assert e.estimate == 1.0 and e.stderr == 0.0


def test_mc_matches_exact_n10(law, field1):
    e = brw_sim.estimate_survival_mc(field1, law, 10, 10**6, 21)
    assert e.within(exact_dp.survival_exact(field1, law, 10))


@pytest.mark.slow
def test_kolmogorov_flat_n1000(law, flat1):
    e = brw_sim.estimate_survival_mc(flat1, law, 1000, 10**6, 5)
    assert 0.85 <= e.estimate * 1000 / 2 <= 1.15


def test_mean_population(law, sub_law, field1, flat1):
    e = brw_sim.estimate_mean_population_mc(field1, law, 20, 10**6, 3)
    assert e.within(1.0)
    e = brw_sim.estimate_mean_population_mc(flat1, sub_law, 5, 10**6, 4)
    assert e.within(0.6**5)
    e = brw_sim.estimate_mean_population_mc(field1, law, 0, 10, 4)
    assert e.estimate == 1.0


def test_extinction_absorbing(law, field1):
    sizes, _ = brw_sim.simulate_sizes(field1, law, [0, 3, 7, 15, 30], 20_000, 9)
    dead = sizes == 0
    assert np.all(dead[:, :-1] <= dead[:, 1:])


def test_all_obstacles_keeps_one(law):
    sizes, _ = brw_sim.simulate_sizes(ObstacleField.all_obstacles(1), law, [1, 10, 100], 1000, 1)
    assert np.all(sizes == 1)


def test_horizon_order_does_not_matter(law, field1):
    a, _ = brw_sim.simulate_sizes(field1, law, [5, 20, 10], 3000, 2)
    b, _ = brw_sim.simulate_sizes(field1, law, [5, 10, 20], 3000, 2)
    assert np.array_equal(a[:, [0, 2, 1]], b)


def test_determinism_across_workers(law, field1):
    a, _ = brw_sim.simulate_sizes(field1, law, [10, 50], 10_000, 77, workers=1)
    b, _ = brw_sim.simulate_sizes(field1, law, [10, 50], 10_000, 77, workers=3)
    assert np.array_equal(a, b)


def test_truncation_counts_as_survival(law, flat1):
    e = brw_sim.estimate_survival_mc(flat1, law, 40, 5000, 3, cap=4)
    assert e.truncated_count > 0 and e.flagged
    sizes, trunc = brw_sim.simulate_sizes(flat1, law, [40], 5000, 3, cap=4)
    alive = (sizes[:, 0] > 0) | trunc
    assert e.estimate == alive.mean()
    assert np.all(sizes[trunc, 0] > 4)


def test_d2_mc_matches_exact(law):
    f = make_field(EnvironmentSpec(2, 0.5, 4))
    e = brw_sim.estimate_survival_mc(f, law, 12, 300_000, 6)
    assert e.within(exact_dp.survival_exact(f, law, 12))
