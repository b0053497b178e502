"""
A small Max-Cut sweep with the experiment harness
=================================================

The harness expands a config into one row per (instance, method, M, T),
writes results.csv and summary.csv and can plot them.
"""

# %%
import tempfile
from pathlib import Path

from annealsched.harness import ExperimentConfig, aggregate, run_experiment, write_outputs
from annealsched.harness.plotting import plot_results

out = Path(tempfile.mkdtemp()) / "maxcut"
cfg = ExperimentConfig.from_dict({
    "problem_kind": "maxcut",
    "instance_sources": [{"n": 8, "count": 2, "seed": 5}],
    "methods": ["linear", "mcts", "bfgs"],
    "T_grid": [1.0, 3.0],
    "M_values": [2],
    "optimizer": {"num_starts": 2, "mcts_budget": 300},
    "output": str(out),
})
rows = run_experiment(cfg)
write_outputs(cfg, rows)

# %%
for s in aggregate(rows):
    print(f"{s.method:>6} T={s.T:<4g} mean fidelity {s.mean_fidelity:.3f} "
          f"+- {s.std_fidelity:.3f}  mean n_fev {s.mean_nfev:.0f}")

# %%
plot_results(rows, out)
print(sorted(p.name for p in out.iterdir()))
