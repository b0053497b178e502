"""
Tuning schedules on 3-SAT: BFGS versus tree search
==================================================

Both optimizers see the annealer only through an evaluator that counts
simulations, so their costs are directly comparable.
"""

# %%
from annealsched import ScheduleEvaluator, generate_hard_sat, sat_hamiltonian
from annealsched.optimizers import linear_baseline, mcts_optimize, multistart_bfgs

h = sat_hamiltonian(generate_hard_sat(6, seed=11))
T, M = 5.0, 3

lin = linear_baseline(ScheduleEvaluator(h, T))
bfgs = multistart_bfgs(ScheduleEvaluator(h, T), M, num_starts=3, seed=0)
mcts = mcts_optimize(ScheduleEvaluator(h, T), M, budget=2000, seed=0)

for name, res in (("linear", lin), ("bfgs", bfgs), ("mcts", mcts)):
    print(f"{name:>6}: fidelity {res.best_fidelity:.4f}  n_fev {res.n_fev:>5}  "
          f"{res.termination}  x = {tuple(round(v, 3) for v in res.best_coefficients)}")

# %%
# The trace records the best fidelity against the number of simulations.
for n_fev, fid in mcts.trace[::5]:
    print(n_fev, round(fid, 4))

# %%
# BFGS pays for a finite-difference gradient on every step, so its cost
# grows with the number of coefficients. Tree search does one simulation per
# iteration whatever M is.
for M in (1, 3, 5):
    b = multistart_bfgs(ScheduleEvaluator(h, T), M, num_starts=2, seed=0)
    m = mcts_optimize(ScheduleEvaluator(h, T), M, budget=2000, seed=0)
    print(f"M={M}: bfgs n_fev {b.n_fev:>5}, mcts n_fev {m.n_fev:>4}")
