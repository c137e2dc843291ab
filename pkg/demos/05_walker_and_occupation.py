# %% [markdown]
# # Single walkers: occupation times and soft killing
#
# A walker's time on vacant sites, T_n, drives everything in this model: the
# mean population equals E[mu^T_n], and the spine branches only at vacant
# visits.  For long walks T_n / n settles near q.

# %%
from brw_obstacles import EnvironmentSpec, exact_dp, make_field, spine, walker

field = make_field(EnvironmentSpec(2, 0.5, 1))
visits, _ = walker.simulate_walks(field, 10_000, 200, master_seed=5)
print("mean T_n/n over 200 walks:", (visits / 10_000).mean())

occ = spine.occupation_frequency_stats(field, 10_000, 200, master_seed=5)
print("spine occupation:", occ)

# %% [markdown]
# Large deviations of T_n / n below q get rarer as n grows.

# %%
for n in (1_000, 10_000):
    t = walker.tail_probability_estimate(field, n, 0.1, 20_000, master_seed=6)
    print(f"n={n:6d}  P(T_n/n < q - 0.1) ~ {t.estimate:.4f} +- {t.stderr:.4f}")

# %% [markdown]
# Soft killing: the walker dies with probability 1 - mu at each vacant visit.
# Averaging mu^T_n instead of simulating the kill is the same expectation
# with lower variance.

# %%
f1 = make_field(EnvironmentSpec(1, 0.5, 1))
est = walker.soft_kill_estimates(f1, 0.5, 15, 200_000, master_seed=7)
print("exact   ", exact_dp.dv_exact(f1, 0.5, 15))
print("killing ", est["kill"].estimate, "+-", est["kill"].stderr)
print("weighted", est["weighted"].estimate, "+-", est["weighted"].stderr)
