"""Monte Carlo Tree Search over discretized Fourier coefficients.

The game has M moves; move k picks the grid value for coefficient x_k.  Each
iteration runs UCT selection from the root, expands one untried child,
completes the schedule with uniformly random moves, scores it with a single
annealer evaluation and backs the fidelity up the visited path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..schedule import ActionGrid
from .result import BestTracker, OptimizationResult, OptimizerError, Termination


@dataclass(frozen=True)
class ConvergenceRule:
    """Stop at ``target_fidelity``, or when the best fidelity improved by less than
    ``min_relative_improvement`` over the last ``window`` iterations."""

    target_fidelity: float = 0.99
    window: int = 20
    min_relative_improvement: float = 0.01
    enabled: bool = True

    @classmethod
    def disabled(cls) -> ConvergenceRule:
        return cls(enabled=False)

    def check(self, best_history: list[float]) -> Termination | None:
        """``best_history[i]`` is the best fidelity after iteration ``i + 1``."""
        if not self.enabled or not best_history:
            return None
        if best_history[-1] >= self.target_fidelity:
            return Termination.CONVERGED_FIDELITY
        if len(best_history) > self.window:
            before = best_history[-1 - self.window]
            gain = (best_history[-1] - before) / max(before, 1e-12)
            if gain < self.min_relative_improvement:
                return Termination.CONVERGED_STALL
        return None


@dataclass(eq=False)
class MctsNode:
    depth: int
    action: int | None = None
    visit_count: int = 0
    value_sum: float = 0.0
    best_value: float = -math.inf
    rollouts: int = 0  # evaluations started from this node
    children: dict[int, MctsNode] = field(default_factory=dict)

    @property
    def mean_value(self) -> float:
        return self.value_sum / self.visit_count if self.visit_count else 0.0

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())


def check_tree(root: MctsNode, num_moves: int) -> None:
    """Raise AssertionError if visit statistics are inconsistent."""
    for node in root.iter_nodes():
        child_visits = sum(c.visit_count for c in node.children.values())
        assert node.visit_count == child_visits + node.rollouts, node
        if node.depth < num_moves:
            assert node.rollouts <= 1, node
        else:
            assert not node.children, node
        for c in node.children.values():
            assert c.depth == node.depth + 1


class MctsSearch:
    """Search state, kept as an object so tests can inspect the tree between iterations."""

    def __init__(self, evaluator, M: int, grid: ActionGrid | None = None, *,
                 exploration: float = math.sqrt(2), seed=None):
        if M < 1:
            raise ValueError("MCTS needs at least one move")
        self.evaluator = evaluator
        self.M = M
        self.grid = grid or ActionGrid()
        self.exploration = exploration
        self.rng = np.random.default_rng(seed)
        self.root = MctsNode(depth=0)
        self.tracker = BestTracker()
        self.best_actions: tuple[int, ...] = ()
        self.history: list[tuple[tuple[int, ...], float]] = []

    def _uct_child(self, node: MctsNode) -> MctsNode:
        log_n = math.log(node.visit_count)
        children = list(node.children.values())
        scores = np.array([
            c.mean_value + self.exploration * math.sqrt(log_n / c.visit_count) for c in children
        ])
        best = np.flatnonzero(scores == scores.max())
        return children[best[self.rng.integers(best.size)]]

    def iterate(self) -> float:
        """One selection/expansion/rollout/backpropagation cycle; returns the reward."""
        K = self.grid.num_values
        node = self.root
        path = [node]
        actions: list[int] = []
        while node.depth < self.M:
            untried = [a for a in range(K) if a not in node.children]
            if untried:
                a = untried[self.rng.integers(len(untried))]
                child = MctsNode(depth=node.depth + 1, action=a)
                node.children[a] = child
                path.append(child)
                actions.append(a)
                node = child
                break
            node = self._uct_child(node)
            path.append(node)
            actions.append(node.action)
        node.rollouts += 1
        tail = self.rng.integers(K, size=self.M - node.depth).tolist()
        full = tuple(actions + tail)

        coeffs = self.grid.coefficients(full)
        fid, en = self.evaluator(coeffs)
        if not (math.isfinite(fid) and math.isfinite(en)):
            raise OptimizerError(f"annealer returned fidelity={fid} for actions {full}")
        if fid > self.tracker.best_fidelity:
            self.best_actions = full
        self.tracker.record(coeffs, fid, en)
        self.tracker.mark()
        self.history.append((full, fid))
        for n in path:
            n.visit_count += 1
            n.value_sum += fid
            n.best_value = max(n.best_value, fid)
        return fid

    def run(self, budget: int, convergence: ConvergenceRule | None = None) -> OptimizationResult:
        if budget < 1:
            raise ValueError("MCTS budget must be at least 1")
        convergence = convergence or ConvergenceRule()
        best_history: list[float] = []
        termination = Termination.BUDGET_EXHAUSTED
        for _ in range(budget):
            self.iterate()
            best_history.append(self.tracker.best_fidelity)
            stop = convergence.check(best_history)
            if stop is not None:
                termination = stop
                break
        return self.tracker.result(termination, iterations=len(best_history),
                                   best_actions=self.best_actions,
                                   tree_nodes=sum(1 for _ in self.root.iter_nodes()))


def mcts_optimize(evaluator, M: int, grid: ActionGrid | None = None, budget: int = 5000,
                  convergence: ConvergenceRule | None = None, seed=None,
                  exploration: float = math.sqrt(2)) -> OptimizationResult:
    """Search the ``grid ** M`` schedule tree; one annealer call per iteration."""
    if budget < 1:
        raise ValueError("MCTS budget must be at least 1")
    search = MctsSearch(evaluator, M, grid, exploration=exploration, seed=seed)
    return search.run(budget, convergence)
