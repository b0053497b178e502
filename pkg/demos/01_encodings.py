"""
Encoding 3-SAT and Max-Cut as diagonal Hamiltonians
===================================================

Each computational basis state is a truth assignment (or a graph cut).
Variable i lives on bit i-1, least significant first, and bit 1 means true.
"""

# %%
import numpy as np

from annealsched import (
    generate_hard_sat,
    ground_truth,
    maxcut_hamiltonian,
    sample_cubic_graph,
    sat_hamiltonian,
)
from annealsched.problems import basis_bits, format_dimacs

# A hard instance has exactly one satisfying assignment and 3n clauses.
inst = generate_hard_sat(6, seed=1)
print(format_dimacs(inst))

# %%
# The energy of a basis state counts violated clauses, so the unique
# solution is the only zero-energy state.
h = sat_hamiltonian(inst)
e0, ground = ground_truth(h)
(idx,) = ground
bits = basis_bits(h.num_qubits)[idx]
print("ground energy", e0, "at index", idx, "-> assignment", bits.astype(bool))
print("satisfies formula:", inst.is_satisfied_by(bits.astype(bool)))
print("energy histogram:", np.bincount(h.diag.astype(int)))

# %%
# For Max-Cut each uncut edge costs 2, so the ground states are the maximum
# cuts. Flipping every vertex gives the same cut, so there are always at
# least two of them.
graph = sample_cubic_graph(8, seed=0)
hc = maxcut_hamiltonian(graph)
e0, ground = ground_truth(hc)
print("edges:", graph.edges)
print("max cut size:", len(graph.edges) - int(e0) // 2, "with", len(ground), "ground states")
