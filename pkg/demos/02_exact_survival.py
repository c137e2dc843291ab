# %% [markdown]
# # Exact quenched survival on a finite box
#
# Survival up to time n depends only on sites within distance n of the
# origin, so a dynamic program on that box is exact.  It gives ground truth
# for the Monte Carlo methods and reaches horizons of a few thousand in d=1.

# %%
import math

from brw_obstacles import EnvironmentSpec, critical_binary, from_masses, make_field
from brw_obstacles import exact_dp

law = critical_binary()
flat = make_field(EnvironmentSpec(1, 0.0, 0))
field = make_field(EnvironmentSpec(1, 0.5, 1))

# %% [markdown]
# Without obstacles the process is a plain Galton-Watson tree and survival
# follows Kolmogorov's 2/n.  With half the sites blocked, branching happens
# on about half the steps and survival is about 2/(qn) = 4/n.

# %%
for n in (10, 100, 1000):
    p_flat = exact_dp.survival_exact(flat, law, n)
    p_obs = exact_dp.survival_exact(field, law, n)
    print(f"n={n:5d}  flat n P/2 = {n * p_flat / 2:.4f}   obstacles n q P/2 = {n * 0.5 * p_obs / 2:.4f}")

# %% [markdown]
# The mean population of a critical process stays exactly one whatever the
# environment.

# %%
print("E|Z_50| =", exact_dp.expected_population(field, law, 50))

# %% [markdown]
# For a subcritical law, survival is squeezed between two single-walker
# soft-killing problems, one killing with probability 1 - mu* and one with
# probability 1 - mu per vacant visit.

# %%
sub = from_masses({0: 0.6, 1: 0.2, 2: 0.2})
for n in (5, 15, 30):
    r = exact_dp.sandwich_check(field, sub, n)
    print(f"n={n:2d}  {r.lower:.3e} <= {r.exact:.3e} <= {r.upper:.3e}  holds={r.holds}")

# %% [markdown]
# Log space keeps tiny probabilities representable.  The decay rate per step
# shrinks with n, which a non-spatial process with decay mu^n would not show.

# %%
half = from_masses({0: 0.75, 2: 0.25})
for n in (200, 500, 1000):
    a = -exact_dp.log_survival_exact(field, half, n)
    print(f"n={n:5d}  -log P = {a:8.2f}   per step {a / n:.4f}   (non-spatial: {-math.log(0.5):.4f})")
