import math

import numpy as np
import pytest

from brw_obstacles import ValidationError, critical_binary, from_masses, llogl, pgf, size_biased
from brw_obstacles.offspring import CRITICAL, SUBCRITICAL, sample, sample_many, survival_map, survival_ratio
from brw_obstacles.rng import make_stream

LAWS = [
    {0: 0.5, 2: 0.5},
    {0: 0.6, 1: 0.2, 2: 0.2},
    {1: 1.0},
    {0: 0.25, 1: 0.5, 2: 0.25},
    {0: 0.7, 3: 0.3},
    {0: 1.0},
]


def test_critical_binary():
    law = critical_binary()
    assert law.mean == 1.0 and law.variance == 1.0 and law.p0 == 0.5
    assert law.regime == CRITICAL
    assert pgf(law, 0.0) == 0.5
    assert pgf(law, 0.5) == 0.625
    assert pgf(law, 1.0) == 1.0
    for z in np.linspace(0, 1, 11):
        assert pgf(law, z) == pytest.approx((1 + z * z) / 2, abs=1e-15)


def test_from_masses_subcritical():
    law = from_masses({0: 0.6, 1: 0.2, 2: 0.2})
    assert law.mean == pytest.approx(0.6, abs=1e-15)
    assert law.regime == SUBCRITICAL
    assert law.mu_star == pytest.approx(0.4)


def test_degenerate_one():
    law = from_masses({1: 1.0})
    assert law.mean == 1.0 and law.regime == CRITICAL and law.variance == 0.0


@pytest.mark.parametrize("masses", [{0: 0.5, 3: 0.5}, {0: 0.5, 1: 0.4}, {0: -0.1, 1: 1.1}, {}, {-1: 1.0}])
def test_invalid_laws(masses):
    with pytest.raises(ValidationError):
        from_masses(masses)


def test_pgf_domain():
    with pytest.raises(ValidationError):
        pgf(critical_binary(), 1.5)


@pytest.mark.parametrize("masses", LAWS)
def test_pgf_invariants(masses):
    law = from_masses(masses)
    assert abs(pgf(law, 1.0) - 1.0) <= 1e-12
    z = np.linspace(0, 1, 201)
    f = np.array([pgf(law, x) for x in z])
    assert np.all(np.diff(f) >= -1e-12)
    assert np.all(np.diff(f, 2) >= -1e-10)
    assert np.all(f >= z - 1e-12)  # phi(z) >= z for mean <= 1


@pytest.mark.parametrize("masses", LAWS[:-1])
def test_size_biased_mean(masses):
    law = from_masses(masses)
    sb = size_biased(law)
    assert sb.p0 == 0.0
    assert sb.mean == pytest.approx((law.mean**2 + law.variance) / law.mean, rel=1e-12)


def test_size_biased_examples():
    assert size_biased(critical_binary()).masses == {2: 1.0}
    assert size_biased(from_masses({1: 1.0})).masses == {1: 1.0}
    sb = size_biased(from_masses({0: 0.6, 1: 0.2, 2: 0.2})).masses
    assert sb[1] == pytest.approx(1 / 3) and sb[2] == pytest.approx(2 / 3)
    with pytest.raises(ValidationError):
        size_biased(from_masses({0: 1.0}))


def test_llogl():
    assert llogl(from_masses({1: 1.0})) == 0.0
    assert llogl(from_masses({0: 1.0})) == 0.0
    assert llogl(critical_binary()) == pytest.approx(math.log(2), abs=1e-15)


def test_sample_degenerate():
    # {2: 1} is supercritical, so it only exists as a size-biased law.
    dyadic = size_biased(critical_binary())
    s = make_stream(1)
    assert all(sample(dyadic, s) == 2 for _ in range(100))


def test_sample_critical_mean():
    draws = sample_many(critical_binary(), make_stream(2), 10**6)
    assert abs(draws.mean() - 1.0) < 3e-3


def test_sample_subcritical_p0():
    draws = sample_many(from_masses({0: 0.6, 1: 0.2, 2: 0.2}), make_stream(3), 10**6)
    p0 = np.mean(draws == 0)
    assert abs(p0 - 0.6) < 3 * math.sqrt(0.6 * 0.4 / 10**6)


@pytest.mark.parametrize("masses", LAWS)
def test_survival_map_and_ratio(masses):
    law = from_masses(masses)
    s = np.array([0.0, 1e-300, 1e-12, 0.1, 0.5, 1.0])
    direct = 1.0 - np.array([pgf(law, 1 - x) for x in s])
    assert np.allclose(survival_map(law, s), direct, atol=1e-15)
    ratio = survival_ratio(law, s)
    assert ratio[0] == pytest.approx(law.mean)
    assert np.allclose(ratio[3:] * s[3:], direct[3:], atol=1e-15)
