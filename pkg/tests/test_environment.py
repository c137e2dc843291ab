import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from brw_obstacles import EnvironmentSpec, ObstacleField, ValidationError, make_field
from brw_obstacles.environment import OBSTACLE, VACANT, is_obstacle, is_vacant, obstacle_mask, vacancy_fraction


@pytest.mark.parametrize("d,p", [(0, 0.5), (1, 1.0), (2, -0.1), (1, 1.5)])
def test_invalid_spec_rejected(d, p):
    with pytest.raises(ValidationError):
        make_field(EnvironmentSpec(d, p, 0))


def test_p_zero_all_vacant():
    f = make_field(EnvironmentSpec(1, 0.0, 7))
    assert all(is_vacant(f, (x,)) for x in range(-500, 500))
    assert vacancy_fraction(f, 10) == 1.0


def test_site_dimension_mismatch():
    f = make_field(EnvironmentSpec(2, 0.5, 1))
    with pytest.raises(ValidationError):
        is_vacant(f, (1,))
    with pytest.raises(ValidationError):
        is_vacant(f, (1, 2, 3))


def test_query_twice_identical():
    f = make_field(EnvironmentSpec(2, 0.5, 1))
    assert f.query((3, -4)) == f.query((3, -4))
    assert f.query((3, -4)) in (OBSTACLE, VACANT)


@settings(max_examples=200)
@given(st.lists(st.integers(-10**9, 10**9), min_size=3, max_size=3), st.integers(0, 2**64 - 1),
       st.floats(0.0, 0.999))
def test_purity_and_complement(site, seed, p):
    f = make_field(EnvironmentSpec(3, p, seed))
    g = make_field(EnvironmentSpec(3, p, seed))
    assert is_vacant(f, site) == is_vacant(g, site)
    assert is_vacant(f, site) != is_obstacle(f, site)


def test_box_mask_matches_pointwise_queries():
    f = make_field(EnvironmentSpec(2, 0.4, 11))
    m = obstacle_mask(f, 3)
    for i in range(7):
        for j in range(7):
            assert m[i, j] == is_obstacle(f, (i - 3, j - 3))


def test_empirical_fraction_1d():
    f = make_field(EnvironmentSpec(1, 0.5, 2024))
    frac = obstacle_mask(f, 50_000)[:100_000].mean()
    assert abs(frac - 0.5) < 0.01


@pytest.mark.parametrize("p,target", [(0.5, 0.5), (0.9, 0.1)])
def test_vacancy_fraction_2d(p, target):
    assert abs(vacancy_fraction(make_field(EnvironmentSpec(2, p, 5)), 100) - target) < 0.02


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_chi_square_bernoulli(p):
    f = make_field(EnvironmentSpec(2, p, 31))
    x = obstacle_mask(f, 49).ravel()[:10_000]
    k = int(x.sum())
    _, pval = stats.chisquare([k, x.size - k], [p * x.size, (1 - p) * x.size])
    assert pval > 1e-3


def test_neighbour_correlation_small():
    f = make_field(EnvironmentSpec(1, 0.5, 77))
    x = obstacle_mask(f, 50_001).astype(float)
    r = np.corrcoef(x[:-1][:100_000], x[1:][:100_000])[0, 1]
    assert abs(r) < 0.02


def test_marginal_over_seeds():
    # Fix a site, vary the master seed.
    hits = sum(is_obstacle(make_field(EnvironmentSpec(2, 0.3, s)), (5, -2)) for s in range(20_000))
    assert abs(hits / 20_000 - 0.3) < 3 * np.sqrt(0.3 * 0.7 / 20_000)


def test_all_obstacles_diagnostic():
    f = ObstacleField.all_obstacles(2)
    assert f.p == 1.0 and f.q == 0.0
    assert not any(is_vacant(f, (x, y)) for x in range(-3, 4) for y in range(-3, 4))


def test_metadata_fields():
    meta = make_field(EnvironmentSpec(2, 0.25, 9)).metadata()
    assert meta == {"d": 2, "p": 0.25, "q": 0.75, "env_seed": 9, "hash_scheme": "splitmix64-zigzag-v1"}
