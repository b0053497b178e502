from .bfgs import (
    BfgsOutcome,
    bfgs_minimize,
    bfgs_optimize,
    central_difference,
    multistart_bfgs,
    strong_wolfe,
)
from .mcts import ConvergenceRule, MctsNode, MctsSearch, check_tree, mcts_optimize
from .result import (
    BestTracker,
    OptimizationResult,
    OptimizerError,
    Termination,
    linear_baseline,
)

__all__ = [
    "BestTracker",
    "BfgsOutcome",
    "ConvergenceRule",
    "MctsNode",
    "MctsSearch",
    "OptimizationResult",
    "OptimizerError",
    "Termination",
    "bfgs_minimize",
    "bfgs_optimize",
    "central_difference",
    "check_tree",
    "linear_baseline",
    "mcts_optimize",
    "multistart_bfgs",
    "strong_wolfe",
]
