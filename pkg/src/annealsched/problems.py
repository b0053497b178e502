"""Problem instances and their diagonal Hamiltonians.

Bit convention, used everywhere in the package: variable ``i`` (1-based) or
vertex ``i - 1`` (0-based) lives on bit ``i - 1`` of a computational-basis
index, least-significant bit first.  Bit value 1 means boolean true and
sigma-z eigenvalue -1.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 20

Literal = tuple[int, bool]  # (variable index 1..n, negated?)
Clause = tuple[Literal, Literal, Literal]


class ProblemError(ValueError):
    """Invalid problem instance or Hamiltonian request."""


class ParseError(ProblemError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GenerationError(RuntimeError):
    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{message} (gave up after {attempts} attempts)")


@dataclass(frozen=True)
class CnfInstance:
    """A 3-SAT formula over variables ``1..num_vars``."""

    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ProblemError(f"num_vars must be positive, got {self.num_vars}")
        clauses = tuple(tuple((int(v), bool(neg)) for v, neg in c) for c in self.clauses)
        for k, clause in enumerate(clauses):
            _check_clause(clause, self.num_vars, f"clause {k}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def is_satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i - 1]`` is the value of variable ``i``."""
        return all(any(assignment[v - 1] != neg for v, neg in c) for c in self.clauses)


def _check_clause(clause, num_vars, where, line=None):
    if len(clause) != 3:
        raise ParseError(f"{where}: expected 3 literals, got {len(clause)}", line)
    variables = [v for v, _ in clause]
    for v in variables:
        if not 1 <= v <= num_vars:
            raise ParseError(f"{where}: variable {v} out of range 1..{num_vars}", line)
    if len(set(variables)) != 3:
        raise ParseError(f"{where}: repeated variable in clause {variables}", line)


@dataclass(frozen=True)
class CutGraph:
    """Undirected, unweighted simple graph on vertices ``0..num_vertices-1``."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ProblemError("graph needs at least one vertex")
        normalized = []
        seen = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ProblemError(f"self-loop at vertex {i}")
            if not (0 <= i < self.num_vertices and 0 <= j < self.num_vertices):
                raise ProblemError(f"edge ({i}, {j}) out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ProblemError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append(key)
        object.__setattr__(self, "edges", tuple(normalized))

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.num_vertices)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        queue = deque([0])
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.num_vertices

    def is_cubic(self) -> bool:
        return all(d == 3 for d in self.degrees())


@dataclass(frozen=True, eq=False)
class DiagonalHamiltonian:
    """Problem Hamiltonian stored as its dense diagonal of length ``2**num_qubits``."""

    num_qubits: int
    diag: np.ndarray
    ground_energy: float = field(init=False)
    ground_indices: frozenset = field(init=False)

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float)
        if diag.shape != (1 << self.num_qubits,):
            raise ProblemError(
                f"diagonal has shape {diag.shape}, expected ({1 << self.num_qubits},)"
            )
        diag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        energy, indices = _argmin_set(diag)
        object.__setattr__(self, "ground_energy", energy)
        object.__setattr__(self, "ground_indices", indices)

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def ground_index_array(self) -> np.ndarray:
        return np.array(sorted(self.ground_indices), dtype=np.intp)

    def excited_energy(self) -> float | None:
        """Lowest energy above the ground level, or None if the spectrum is flat."""
        above = self.diag[self.diag > self.ground_energy]
        return float(above.min()) if above.size else None


def _argmin_set(diag: np.ndarray) -> tuple[float, frozenset]:
    energy = float(diag.min())
    return energy, frozenset(int(z) for z in np.flatnonzero(diag == energy))


def ground_truth(h: DiagonalHamiltonian) -> tuple[float, frozenset]:
    """Exact ground energy and the full set of ground-state basis indices."""
    return _argmin_set(h.diag)


def _check_size(n: int, max_qubits: int):
    if n > max_qubits:
        raise ProblemError(f"{n} qubits exceeds the configured maximum of {max_qubits}")


def basis_bits(n: int) -> np.ndarray:
    """``bits[z, i]`` is bit ``i`` of basis index ``z``, shape ``(2**n, n)``."""
    z = np.arange(1 << n)
    return ((z[:, None] >> np.arange(n)) & 1).astype(np.int8)


def sat_hamiltonian(inst: CnfInstance, max_qubits: int = MAX_QUBITS) -> DiagonalHamiltonian:
    """Violated-clause counting Hamiltonian of a 3-SAT instance."""
    _check_size(inst.num_vars, max_qubits)
    return DiagonalHamiltonian(inst.num_vars, _violations(inst, basis_bits(inst.num_vars)))


def _violations(inst: CnfInstance, bits: np.ndarray) -> np.ndarray:
    counts = np.zeros(bits.shape[0], dtype=np.int32)
    if not inst.clauses:
        return counts
    var = np.array([[v - 1 for v, _ in c] for c in inst.clauses])
    # a literal is false when its bit equals its negation flag
    neg = np.array([[int(n) for _, n in c] for c in inst.clauses], dtype=np.int8)
    for k in range(len(inst.clauses)):
        counts += np.all(bits[:, var[k]] == neg[k], axis=1)
    return counts


def count_solutions(inst: CnfInstance) -> int:
    """Number of satisfying assignments, by exhaustive enumeration."""
    return int(np.count_nonzero(_violations(inst, basis_bits(inst.num_vars)) == 0))


def maxcut_hamiltonian(g: CutGraph, max_qubits: int = MAX_QUBITS) -> DiagonalHamiltonian:
    """Antiferromagnetic Ising energy sum over edges of (1 + Z_i Z_j)."""
    _check_size(g.num_vertices, max_qubits)
    bits = basis_bits(g.num_vertices)
    diag = np.zeros(1 << g.num_vertices)
    for i, j in g.edges:
        diag += 2.0 * (bits[:, i] == bits[:, j])
    return DiagonalHamiltonian(g.num_vertices, diag)


def generate_hard_sat(
    n: int,
    seed: int,
    *,
    ratio: int = 3,
    max_attempts: int = 1_000_000,
) -> CnfInstance:
    """Random 3-SAT instance with ``ratio * n`` clauses and exactly one solution.

    Candidates are drawn clause by clause (three distinct variables, random
    polarities, no repeated clause) and rejected until brute-force
    enumeration finds a unique satisfying assignment.
    """
    if not 4 <= n <= 16:
        raise ProblemError(f"n must be in [4, 16] for exhaustive verification, got {n}")
    rng = np.random.default_rng(seed)
    m = ratio * n
    bits = basis_bits(n)
    for attempt in range(1, max_attempts + 1):
        clauses = []
        seen = set()
        while len(clauses) < m:
            variables = rng.choice(n, size=3, replace=False) + 1
            negs = rng.integers(0, 2, size=3).astype(bool)
            clause = tuple(sorted(zip(variables.tolist(), negs.tolist())))
            if clause in seen:
                continue
            seen.add(clause)
            clauses.append(clause)
        inst = CnfInstance(n, tuple(clauses))
        if np.count_nonzero(_violations(inst, bits) == 0) == 1:
            return inst
    raise GenerationError(f"no unique-solution instance found for n={n}", max_attempts)


def sample_cubic_graph(num_vertices: int, seed: int, max_attempts: int = 100_000) -> CutGraph:
    """Connected simple 3-regular graph from the pairing (configuration) model."""
    if num_vertices < 4 or num_vertices % 2:
        raise ProblemError(f"cubic graphs need an even vertex count >= 4, got {num_vertices}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(num_vertices), 3)
    for _ in range(max_attempts):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(min(a, b)), int(max(a, b))) for a, b in pairs}
        if len(edges) != len(pairs):
            continue
        graph = CutGraph(num_vertices, tuple(sorted(edges)))
        if graph.is_connected():
            return graph
    raise GenerationError(f"no connected cubic graph on {num_vertices} vertices", max_attempts)


# -- text formats -----------------------------------------------------------


def parse_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS CNF restricted to 3-literal clauses, one clause per line."""
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise ParseError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if header[0] < 1 or header[1] < 0:
                raise ParseError(f"malformed header {line!r}", lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        try:
            ints = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if not ints or ints[-1] != 0:
            raise ParseError("clause line must end with 0", lineno)
        lits = ints[:-1]
        if 0 in lits:
            raise ParseError("one clause per line expected", lineno)
        clause = tuple((abs(x), x < 0) for x in lits)
        _check_clause(clause, header[0], "clause", lineno)
        clauses.append(clause)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfInstance(header[0], tuple(clauses))


def format_dimacs(inst: CnfInstance, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {inst.num_vars} {inst.num_clauses}")
    for clause in inst.clauses:
        lines.append(" ".join(str(-v if neg else v) for v, neg in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> CutGraph:
    """Edge-list format: vertex count, then one ``i j`` pair per line; ``#`` comments."""
    num_vertices = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            ints = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if num_vertices is None:
            if len(ints) != 1 or ints[0] < 1:
                raise ParseError("first line must be the vertex count", lineno)
            num_vertices = ints[0]
            continue
        if len(ints) != 2:
            raise ParseError(f"expected an 'i j' pair, got {line!r}", lineno)
        edges.append((ints[0], ints[1]))
    if num_vertices is None:
        raise ParseError("empty graph file")
    try:
        return CutGraph(num_vertices, tuple(edges))
    except ProblemError as exc:
        raise ParseError(str(exc)) from None


def format_graph(g: CutGraph, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(str(g.num_vertices))
    lines.extend(f"{i} {j}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def triangle_count(g: CutGraph) -> int:
    edges = set(g.edges)
    return sum(
        1
        for a, b, c in itertools.combinations(range(g.num_vertices), 3)
        if (a, b) in edges and (a, c) in edges and (b, c) in edges
    )
