"""Quantum-annealing schedule optimization for 3-SAT and Max-Cut.

Schedules ``s(t) = t/T + sum_k x_k sin(pi k t / T)`` are scored by simulating
the annealer exactly on the state vector; the coefficients are tuned either
by multi-start BFGS in continuous space or by Monte Carlo Tree Search over a
discrete grid of values.
"""
from .dynamics import (
    EvalCounter,
    EvolutionConfig,
    ScheduleEvaluator,
    energy,
    evaluate_schedule,
    evolve,
    evolve_many,
    fidelity,
    initial_state,
)
from .problems import (
    CnfInstance,
    CutGraph,
    DiagonalHamiltonian,
    generate_hard_sat,
    ground_truth,
    maxcut_hamiltonian,
    parse_dimacs,
    parse_graph,
    sample_cubic_graph,
    sat_hamiltonian,
)
from .schedule import ActionGrid, FourierSchedule, from_actions

__version__ = "0.1.0"
