# %% [markdown]
# # Obstacle fields and offspring laws
#
# An obstacle field is a pure function of (seed, site): nothing is stored, so
# any site of an unbounded lattice can be queried and two runs with the same
# seed see the same environment.

# %%
from brw_obstacles import EnvironmentSpec, critical_binary, from_masses, make_field, size_biased
from brw_obstacles.environment import is_obstacle, obstacle_mask, vacancy_fraction
from brw_obstacles.offspring import sample_many
from brw_obstacles.rng import make_stream

field = make_field(EnvironmentSpec(d=2, p=0.3, master_seed=42))
print(field.metadata())
print("origin is an obstacle:", is_obstacle(field, (0, 0)))
print("far site (10**9, -7) is an obstacle:", is_obstacle(field, (10**9, -7)))

# %% [markdown]
# A small window of the field (`#` obstacle, `.` vacant), and the vacant
# fraction of a large box, which should be close to q = 0.7.

# %%
for row in obstacle_mask(field, 8):
    print("".join("#" if x else "." for x in row))
print("vacancy fraction in radius-300 box:", round(vacancy_fraction(field, 300), 4))

# %% [markdown]
# Offspring laws are finite mass functions.  The critical binary law has mean
# one; its size-biased version is the law along the spine.

# %%
law = critical_binary()
sub = from_masses({0: 0.6, 1: 0.2, 2: 0.2})
print(law.law_id, "mean", law.mean, "regime", law.regime)
print(sub.law_id, "mean", sub.mean, "mu* = 1 - p0 =", sub.mu_star)
print("size-biased binary:", size_biased(law).masses)

draws = sample_many(sub, make_stream(7), 100_000)
print("empirical mean of 10^5 draws:", draws.mean())
