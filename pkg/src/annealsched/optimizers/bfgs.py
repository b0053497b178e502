"""BFGS with a strong-Wolfe line search and central finite-difference gradients."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .result import BestTracker, OptimizationResult, OptimizerError, Termination


class _BudgetExhausted(Exception):
    pass


class _LineSearchFailed(Exception):
    pass


@dataclass
class BfgsOutcome:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    nit: int
    n_fun: int  # objective value probes (initial point + line search)
    n_grad: int  # gradient evaluations
    n_fev: int  # all objective calls, finite-difference probes included
    status: Termination


def _cubicmin(a, fa, fpa, b, fb, c, fc):
    """Minimizer of the cubic through (a, fa) with slope fpa at a, (b, fb), (c, fc)."""
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        try:
            C = fpa
            db, dc = b - a, c - a
            denom = (db * dc) ** 2 * (db - dc)
            d1 = np.array([[dc ** 2, -db ** 2], [-dc ** 3, db ** 3]])
            A, B = d1 @ np.array([fb - fa - C * db, fc - fa - C * dc]) / denom
            radical = B * B - 3 * A * C
            xmin = a + (-B + np.sqrt(radical)) / (3 * A)
        except (ArithmeticError, FloatingPointError):
            return None
    return xmin if np.isfinite(xmin) else None


def _quadmin(a, fa, fpa, b, fb):
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        try:
            db = b - a
            B = (fb - fa - fpa * db) / (db * db)
            xmin = a - fpa / (2.0 * B)
        except (ArithmeticError, FloatingPointError):
            return None
    return xmin if np.isfinite(xmin) else None


class _Phi:
    """phi(alpha) = f(x + alpha p), caching values and directional derivatives."""

    def __init__(self, f, grad, x, p):
        self.f, self.grad, self.x, self.p = f, grad, x, p
        self.values: dict[float, float] = {}
        self.grads: dict[float, np.ndarray] = {}

    def __call__(self, alpha):
        if alpha not in self.values:
            self.values[alpha] = self.f(self.x + alpha * self.p)
        return self.values[alpha]

    def deriv(self, alpha):
        if alpha not in self.grads:
            self.grads[alpha] = self.grad(self.x + alpha * self.p)
        return float(self.grads[alpha] @ self.p)


def strong_wolfe(phi: _Phi, f0: float, d0: float, *, alpha1: float = 1.0, c1: float = 1e-4,
                 c2: float = 0.9, alpha_max: float = 1e10, max_iter: int = 30) -> float:
    """Step length satisfying the strong Wolfe conditions (bracketing phase)."""
    a_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = alpha1
    for i in range(max_iter):
        f_a = phi(alpha)
        if f_a > f0 + c1 * alpha * d0 or (i > 0 and f_a >= f_prev):
            return _zoom(phi, a_prev, alpha, f_prev, f_a, d_prev, f0, d0, c1, c2)
        d_a = phi.deriv(alpha)
        if abs(d_a) <= -c2 * d0:
            return alpha
        if d_a >= 0:
            return _zoom(phi, alpha, a_prev, f_a, f_prev, d_a, f0, d0, c1, c2)
        a_prev, f_prev, d_prev = alpha, f_a, d_a
        alpha = min(2.0 * alpha, alpha_max)
    raise _LineSearchFailed("bracketing did not terminate")


def _zoom(phi, a_lo, a_hi, f_lo, f_hi, d_lo, f0, d0, c1, c2, max_iter=30):
    a_rec, f_rec = 0.0, f0
    for i in range(max_iter):
        delta = a_hi - a_lo
        if abs(delta) < 1e-14 * max(1.0, abs(a_lo)):
            break
        lo, hi = min(a_lo, a_hi), max(a_lo, a_hi)
        trial = None
        if i > 0:
            trial = _cubicmin(a_lo, f_lo, d_lo, a_hi, f_hi, a_rec, f_rec)
            if trial is not None and not (lo + 0.2 * abs(delta) < trial < hi - 0.2 * abs(delta)):
                trial = None
        if trial is None:
            trial = _quadmin(a_lo, f_lo, d_lo, a_hi, f_hi)
            if trial is None or not (lo + 0.1 * abs(delta) < trial < hi - 0.1 * abs(delta)):
                trial = a_lo + 0.5 * delta
        f_t = phi(trial)
        if f_t > f0 + c1 * trial * d0 or f_t >= f_lo:
            a_rec, f_rec = a_hi, f_hi
            a_hi, f_hi = trial, f_t
            continue
        d_t = phi.deriv(trial)
        if abs(d_t) <= -c2 * d0:
            return trial
        if d_t * (a_hi - a_lo) >= 0:
            a_rec, f_rec = a_hi, f_hi
            a_hi, f_hi = a_lo, f_lo
        else:
            a_rec, f_rec = a_lo, f_lo
        a_lo, f_lo, d_lo = trial, f_t, d_t
    raise _LineSearchFailed("zoom did not find an acceptable step")


def central_difference(fun, x, step: float = 1e-3, fun_many=None) -> np.ndarray:
    """Central-difference gradient: 2 * len(x) calls, in the order +e_0, -e_0, +e_1, ..."""
    x = np.asarray(x, dtype=float)
    probes = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = step
        probes.extend((x + e, x - e))
    vals = fun_many(probes) if fun_many is not None else [fun(p) for p in probes]
    vals = np.asarray(vals, dtype=float)
    return (vals[0::2] - vals[1::2]) / (2.0 * step)


def bfgs_minimize(
    fun: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    fun_many: Callable[[list], list] | None = None,
    fd_step: float = 1e-3,
    gtol: float = 1e-6,
    max_fev: int = 10_000,
    max_iter: int | None = None,
    c1: float = 1e-4,
    c2: float = 0.9,
    callback: Callable[[np.ndarray, float], None] | None = None,
) -> BfgsOutcome:
    """Minimize ``fun`` from ``x0``.

    Without ``grad`` the gradient is a central difference with absolute step
    ``fd_step`` (2 * len(x0) extra calls, batched through ``fun_many`` when
    given).  Stops when the infinity norm of the gradient drops below
    ``gtol``, when the line search fails, or when ``max_fev`` objective calls
    (finite-difference probes included) would be exceeded.
    """
    x = np.array(x0, dtype=float)
    dim = x.size
    counts = {"fun": 0, "grad": 0, "fev": 0}

    def f(z):
        if counts["fev"] + 1 > max_fev:
            raise _BudgetExhausted
        counts["fun"] += 1
        counts["fev"] += 1
        val = float(fun(z))
        if not math.isfinite(val):
            raise OptimizerError(f"objective returned {val} at x={z.tolist()}")
        return val

    def g(z):
        if grad is not None:
            counts["grad"] += 1
            out = np.asarray(grad(z), dtype=float)
        else:
            if counts["fev"] + 2 * dim > max_fev:
                raise _BudgetExhausted
            counts["grad"] += 1
            counts["fev"] += 2 * dim
            out = central_difference(fun, z, fd_step, fun_many)
        if not np.all(np.isfinite(out)):
            raise OptimizerError(f"non-finite gradient at x={z.tolist()}")
        return out

    nit = 0
    fx = gx = None
    status = Termination.BUDGET_EXHAUSTED
    try:
        fx = f(x)
        gx = g(x)
        H = np.eye(dim)
        while True:
            if np.max(np.abs(gx), initial=0.0) < gtol:
                status = Termination.GRADIENT_CONVERGED
                break
            if max_iter is not None and nit >= max_iter:
                status = Termination.BUDGET_EXHAUSTED
                break
            p = -H @ gx
            d0 = float(gx @ p)
            if d0 >= 0:
                H = np.eye(dim)
                p = -gx
                d0 = float(gx @ p)
            phi = _Phi(f, g, x, p)
            phi.values[0.0] = fx
            try:
                alpha = strong_wolfe(phi, fx, d0, c1=c1, c2=c2)
            except _LineSearchFailed:
                status = Termination.LINE_SEARCH_FAILED
                break
            step = alpha * p
            x_new = x + step
            g_new = phi.grads[alpha] if alpha in phi.grads else g(x_new)
            y = g_new - gx
            ys = float(y @ step)
            if ys > 1e-12 * float(np.linalg.norm(y) * np.linalg.norm(step)) and ys > 0:
                rho = 1.0 / ys
                V = np.eye(dim) - rho * np.outer(step, y)
                H = V @ H @ V.T + rho * np.outer(step, step)
            x, fx, gx = x_new, phi.values[alpha], g_new
            nit += 1
            if callback is not None:
                callback(x, fx)
    except _BudgetExhausted:
        status = Termination.BUDGET_EXHAUSTED
    return BfgsOutcome(
        x=x,
        fun=fx if fx is not None else float("nan"),
        grad=gx if gx is not None else np.full(dim, np.nan),
        nit=nit,
        n_fun=counts["fun"],
        n_grad=counts["grad"],
        n_fev=counts["fev"],
        status=status,
    )


def _objective(evaluator, tracker: BestTracker):
    def check(x, fid, en):
        if not (math.isfinite(fid) and math.isfinite(en)):
            raise OptimizerError(f"annealer returned fidelity={fid}, energy={en} at x={list(x)}")
        tracker.record(x, fid, en)
        return 1.0 - fid

    def fun(x):
        fid, en = evaluator(tuple(x))
        return check(x, fid, en)

    def fun_many(xs):
        many = getattr(evaluator, "evaluate_many", None)
        results = many([tuple(x) for x in xs]) if many else [evaluator(tuple(x)) for x in xs]
        return [check(x, fid, en) for x, (fid, en) in zip(xs, results)]

    return fun, fun_many


def bfgs_optimize(evaluator, M: int, x0: Sequence[float] | None = None, *,
                  fd_step: float = 1e-3, gtol: float = 1e-6, max_fev: int = 10_000,
                  c1: float = 1e-4, c2: float = 0.9) -> OptimizationResult:
    """Maximize fidelity over unconstrained Fourier coefficients.

    ``evaluator`` maps a coefficient tuple to ``(fidelity, energy)``.  The
    objective is ``1 - fidelity``; the returned point is the best one ever
    evaluated, finite-difference probes included.
    """
    if M < 1:
        raise ValueError("BFGS needs at least one coefficient")
    x0 = np.zeros(M) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (M,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({M},)")
    tracker = BestTracker()
    fun, fun_many = _objective(evaluator, tracker)
    out = bfgs_minimize(fun, x0, fun_many=fun_many, fd_step=fd_step, gtol=gtol,
                        max_fev=max_fev, c1=c1, c2=c2,
                        callback=lambda x, fx: tracker.mark())
    return tracker.result(out.status, iterations=out.nit, n_fun=out.n_fun,
                          n_grad=out.n_grad, final_x=tuple(out.x.tolist()))


def multistart_bfgs(evaluator, M: int, num_starts: int = 10, noise_scale: float = 0.05,
                    seed=None, **bfgs_kwargs) -> OptimizationResult:
    """Best of several BFGS runs: the linear schedule, then noisy perturbations of it."""
    if num_starts < 1:
        raise ValueError("num_starts must be at least 1")
    rng = np.random.default_rng(seed)
    starts = [np.zeros(M)]
    for _ in range(num_starts - 1):
        starts.append(rng.normal(0.0, noise_scale, size=M))

    best = None
    total = 0
    trace: list[tuple[int, float]] = []
    runs = []
    for x0 in starts:
        res = bfgs_optimize(evaluator, M, x0, **bfgs_kwargs)
        floor = trace[-1][1] if trace else -float("inf")
        trace.extend((total + k, max(floor, fid)) for k, fid in res.trace)
        total += res.n_fev
        runs.append({"x0": tuple(x0.tolist()), "best_fidelity": res.best_fidelity,
                     "n_fev": res.n_fev, "termination": str(res.termination)})
        if best is None or res.best_fidelity > best.best_fidelity:
            best = res
    return OptimizationResult(
        best_coefficients=best.best_coefficients,
        best_fidelity=best.best_fidelity,
        best_energy=best.best_energy,
        n_fev=total,
        termination=best.termination,
        trace=trace,
        stats={"starts": runs},
    )
