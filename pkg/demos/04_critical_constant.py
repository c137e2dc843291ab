# %% [markdown]
# # The critical constant from simulation
#
# Run a small survival curve through the experiment runner and normalise it
# by 2/(qn).  The acceptance suite does the same with 2e6 replicas up to
# n=2000; here a lighter grid keeps the demo under a minute.

# %%
from brw_obstacles.experiments import config_from_dict
from brw_obstacles.experiments.tasks import fit_critical

cfg = config_from_dict({
    "kind": "fit-critical",
    "experiment_id": "demo-critical",
    "seed": 11,
    "environment": {"d": 1, "p": 0.5, "env_seeds": [1, 2, 3]},
    "horizons": [50, 100, 200, 400],
    "methods": ["EXACT_DP", "DIRECT_MC"],
    "replicates": {"mc": 200_000},
})
summary = fit_critical(cfg)

for key, fit in sorted(summary["fits"].items()):
    print(f"{key:16s} c_n = " + "  ".join(f"{c:.3f}" for c in fit["values"]))
print("environment-averaged |c_n - 1|:", summary["environment_averaged_deviation"])
