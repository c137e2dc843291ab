# %% [markdown]
# # Direct simulation versus the spine estimator
#
# Direct Monte Carlo counts surviving replicas.  The spine estimator samples
# the size-biased process, which never dies, and averages 1/|Z_n|.  Both are
# unbiased; the spine one has far smaller variance when survival is rare.

# %%
from brw_obstacles import EnvironmentSpec, brw_sim, critical_binary, exact_dp, make_field, spine

law = critical_binary()
field = make_field(EnvironmentSpec(1, 0.5, 1))

for n in (10, 50, 200):
    exact = exact_dp.survival_exact(field, law, n)
    mc = brw_sim.estimate_survival_mc(field, law, n, 200_000, master_seed=1)
    is_ = spine.estimate_survival_is(field, law, n, 20_000, master_seed=1)
    print(f"n={n:4d}  exact {exact:.5f}  MC {mc.estimate:.5f}+-{mc.stderr:.5f}  "
          f"spine {is_.estimate:.5f}+-{is_.stderr:.5f}")

# %% [markdown]
# Per-replica variance: a Bernoulli(P) indicator against 1/|Z_n| under the
# size-biased law.

# %%
n = 200
p = exact_dp.survival_exact(field, law, n)
is_ = spine.estimate_survival_is(field, law, n, 20_000, master_seed=2)
print("MC variance per replica   ", p * (1 - p))
print("spine variance per replica", is_.stderr**2 * is_.replicates)

# %% [markdown]
# Conditioned on survival, the population has mean E|Z_n| / P(S_n) = 1/P(S_n).
# Rejection sampling from the spine process recovers it.

# %%
check = spine.conditional_population_check(field, law, 8, 20_000, master_seed=3)
print(check)
