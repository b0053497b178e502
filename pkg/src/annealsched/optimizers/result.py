from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..schedule import FourierSchedule


class Termination(str, Enum):
    CONVERGED_FIDELITY = "converged_fidelity"
    CONVERGED_STALL = "converged_stall"
    BUDGET_EXHAUSTED = "budget_exhausted"
    GRADIENT_CONVERGED = "gradient_converged"
    LINE_SEARCH_FAILED = "line_search_failed"
    # linear baseline and other single-shot evaluations
    EVALUATED = "evaluated"

    def __str__(self):
        return self.value


class OptimizerError(RuntimeError):
    pass


@dataclass
class OptimizationResult:
    """Best schedule seen by an optimizer together with its cost.

    ``trace`` holds ``(n_fev, best_fidelity_so_far)`` pairs and is
    nondecreasing in both entries.
    """

    best_coefficients: tuple[float, ...]
    best_fidelity: float
    best_energy: float
    n_fev: int
    termination: Termination
    trace: list[tuple[int, float]] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def schedule(self, total_time: float) -> FourierSchedule:
        return FourierSchedule(total_time, self.best_coefficients)


class BestTracker:
    """Counts evaluations and keeps the best (highest-fidelity) point seen."""

    def __init__(self):
        self.n_fev = 0
        self.best_fidelity = -float("inf")
        self.best_energy = float("nan")
        self.best_x: tuple[float, ...] = ()
        self.trace: list[tuple[int, float]] = []

    def record(self, x, fid: float, energy: float) -> None:
        self.n_fev += 1
        if fid > self.best_fidelity:
            self.best_fidelity = fid
            self.best_energy = energy
            self.best_x = tuple(float(v) for v in x)

    def mark(self) -> None:
        self.trace.append((self.n_fev, self.best_fidelity))

    def result(self, termination: Termination, **stats) -> OptimizationResult:
        if not self.trace or self.trace[-1][0] != self.n_fev:
            self.mark()
        return OptimizationResult(
            best_coefficients=self.best_x,
            best_fidelity=self.best_fidelity,
            best_energy=self.best_energy,
            n_fev=self.n_fev,
            termination=termination,
            trace=self.trace,
            stats=stats,
        )


def linear_baseline(evaluator) -> OptimizationResult:
    """The plain ``s(t) = t/T`` schedule, evaluated once."""
    fid, en = evaluator(())
    tracker = BestTracker()
    tracker.record((), fid, en)
    return tracker.result(Termination.EVALUATED)
