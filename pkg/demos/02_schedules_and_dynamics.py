"""
Schedules and annealing dynamics
================================

A schedule is the linear ramp t/T plus a short sine series. We simulate the
annealer on the full state vector and read off the probability of landing
in the ground space.
"""

# %%
import numpy as np

from annealsched import (
    EvolutionConfig,
    FourierSchedule,
    ScheduleEvaluator,
    generate_hard_sat,
    sat_hamiltonian,
)
from annealsched.schedule import ActionGrid, from_actions

s = FourierSchedule(10.0, (0.1, -0.05))
t = np.linspace(0, 10, 6)
print("s(t) =", np.round(s(t), 3))

# The action grid used by tree search holds 40 evenly spaced values.
grid = ActionGrid()
print(from_actions([0, 20, 39], grid, 10.0))

# %%
# Longer annealing times follow the instantaneous ground state more closely.
h = sat_hamiltonian(generate_hard_sat(8, seed=3))
for T in (1, 5, 20, 50):
    fid, en = ScheduleEvaluator(h, T)(())
    print(f"T={T:>3}  fidelity {fid:.4f}  energy {en:.4f}")

# %%
# Halving the step cuts the splitting error by about four.
ev = {dt: ScheduleEvaluator(h, 10.0, EvolutionConfig(dt=dt)) for dt in (0.2, 0.1, 0.05, 0.001)}
ref = ev[0.001]((0.1,))[0]
errs = [abs(ev[dt]((0.1,))[0] - ref) for dt in (0.2, 0.1, 0.05)]
print("fidelity error vs dt:", ["%.2e" % e for e in errs])
print("ratios:", np.round(np.array(errs[:-1]) / np.array(errs[1:]), 2))
