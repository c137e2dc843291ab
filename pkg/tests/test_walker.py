import math

import numpy as np
import pytest

from brw_obstacles import EnvironmentSpec, ObstacleField, ValidationError, make_field
from brw_obstacles import exact_dp, walker
from brw_obstacles.rng import make_stream


def test_srw_occupation_trivial(flat1, stream):
    assert walker.srw_occupation(flat1, 100, stream).occupation == 100
    assert walker.srw_occupation(ObstacleField.all_obstacles(1), 100, stream).occupation == 0
    with pytest.raises(ValidationError):
        walker.srw_occupation(flat1, 0, stream)


def test_srw_occupation_reproducible(field1):
    a = walker.srw_occupation(field1, 1000, make_stream(4, 2))
    b = walker.srw_occupation(field1, 1000, make_stream(4, 2))
    assert a == b


def test_occupation_mean_matches_dp(field1):
    n = 10**4
    visits, _ = walker.simulate_walks(field1, n, 1000, 5)
    exact_mean = exact_dp.expected_occupation(field1, n) / n
    assert abs(visits.mean() / n - exact_mean) <= 3 * visits.std(ddof=1) / n / math.sqrt(visits.size)


def test_tail_trivial(flat1, field1):
    assert walker.tail_probability_estimate(flat1, 100, 0.01, 500, 1).estimate == 0.0
    assert walker.tail_probability_estimate(field1, 100, 1.0, 500, 1).estimate == 0.0
    with pytest.raises(ValidationError):
        walker.tail_probability_estimate(field1, 100, 0.0, 500, 1)


def test_tail_decreases_with_n(field1):
    small = walker.tail_probability_estimate(field1, 10**3, 0.1, 10**5, 7)
    large = walker.tail_probability_estimate(field1, 10**4, 0.1, 10**5, 7)
    assert large.estimate < small.estimate


def test_soft_kill_trivial(field1):
    assert walker.soft_kill_survival_mc(field1, 1.0, 50, 1000, 1).estimate == 1.0
    e = walker.soft_kill_survival_mc(ObstacleField.all_obstacles(1), 0.3, 50, 1000, 1)
    assert e.estimate == 1.0 and e.metadata["kill_estimate"] == 1.0
    with pytest.raises(ValidationError):
        walker.soft_kill_survival_mc(field1, 0.0, 5, 10, 1)


def test_soft_kill_matches_dv(field1):
    exact = exact_dp.dv_exact(field1, 0.5, 15)
    both = walker.soft_kill_estimates(field1, 0.5, 15, 10**6, 13)
    assert both["kill"].within(exact)
    assert both["weighted"].within(exact)
    assert both["weighted"].stderr <= both["kill"].stderr


def test_soft_kill_d2():
    f = make_field(EnvironmentSpec(2, 0.3, 6))
    exact = exact_dp.dv_exact(f, 0.7, 12)
    assert walker.soft_kill_survival_mc(f, 0.7, 12, 200_000, 2).within(exact)


def test_walks_independent_of_workers(field1):
    a, _ = walker.simulate_walks(field1, 200, 500, 3)
    b, _ = walker.simulate_walks(field1, 200, 500, 3, workers=2)
    assert np.array_equal(a, b)
