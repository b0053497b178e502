"""State-vector simulation of H(t) = (1 - s(t)) H0 + s(t) Hf.

The driver is ``H0 = sign * sum_j X_j`` (sign +1 by default).  Evolution uses
second-order Strang splitting with the schedule sampled at each step's
midpoint.  The problem factor is a diagonal phase; the driver factor is
diagonal in the Hadamard (X) basis, where ``sum_j X_j`` has eigenvalue
``n - 2 * popcount(w)`` on index ``w``.  The state therefore alternates
between the two bases, and the n-qubit Hadamard transform is applied as
``W_a @ psi @ W_b`` on the state reshaped to ``(2**a, 2**b)``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import hadamard

from .problems import MAX_QUBITS, DiagonalHamiltonian
from .schedule import FourierSchedule


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = 0.05
    driver_sign: int = 1
    integrator: str = "strang"

    def __post_init__(self):
        if not self.dt > 0:
            raise DynamicsError(f"dt must be positive, got {self.dt}")
        if self.driver_sign not in (1, -1):
            raise DynamicsError("driver_sign must be +1 or -1")
        if self.integrator != "strang":
            raise DynamicsError(f"unknown integrator {self.integrator!r}")


class EvalCounter:
    """Thread-safe tally of full schedule simulations."""

    def __init__(self, count: int = 0):
        self._count = count
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def increment(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("counter increments must be non-negative")
        with self._lock:
            self._count += k

    def merge(self, other: EvalCounter) -> None:
        self.increment(other.count)

    def __repr__(self):
        return f"EvalCounter({self._count})"


@lru_cache(maxsize=None)
def _hadamard_factors(n: int) -> tuple[np.ndarray, np.ndarray]:
    a = n // 2
    b = n - a
    wa = (hadamard(1 << a) / math.sqrt(1 << a)).astype(complex)
    wb = (hadamard(1 << b) / math.sqrt(1 << b)).astype(complex)
    return wa, wb


@lru_cache(maxsize=None)
def _driver_spectrum(n: int) -> np.ndarray:
    """Eigenvalues of sum_j X_j indexed by Hadamard-basis index, reshaped (2**a, 2**b)."""
    w = np.arange(1 << n)
    popcount = np.zeros_like(w)
    for i in range(n):
        popcount += (w >> i) & 1
    lam = (n - 2 * popcount).astype(float)
    lam.setflags(write=False)
    return lam.reshape(1 << (n // 2), 1 << (n - n // 2))


def _check_qubits(n: int, max_qubits: int = MAX_QUBITS):
    if not 1 <= n <= max_qubits:
        raise DynamicsError(f"qubit count {n} outside [1, {max_qubits}]")


def initial_state(n: int, driver_sign: int = 1, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Ground state of the driver: every qubit in |-> (or |+> for driver_sign=-1)."""
    _check_qubits(n, max_qubits)
    z = np.arange(1 << n)
    amp = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    if driver_sign == 1:
        parity = np.zeros_like(z)
        for i in range(n):
            parity ^= (z >> i) & 1
        amp[parity == 1] *= -1
    return amp


def driver_energy(state: np.ndarray, driver_sign: int = 1) -> float:
    """Expectation value of the driver Hamiltonian."""
    n = int(np.log2(state.shape[-1]))
    wa, wb = _hadamard_factors(n)
    x = wa @ state.reshape(wa.shape[0], wb.shape[0]) @ wb
    return float(driver_sign * np.sum(np.abs(x) ** 2 * _driver_spectrum(n)))


def time_steps(total_time: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Step lengths and midpoints covering [0, T]; the last step takes the remainder."""
    n_steps = max(1, math.ceil(total_time / dt - 1e-9))
    lengths = np.full(n_steps, min(dt, total_time))
    lengths[-1] = total_time - dt * (n_steps - 1) if n_steps > 1 else total_time
    starts = np.concatenate(([0.0], np.cumsum(lengths[:-1])))
    return lengths, starts + 0.5 * lengths


def _propagate(h: DiagonalHamiltonian, s_mid: np.ndarray, lengths: np.ndarray,
               driver_sign: int) -> np.ndarray:
    """Evolve the driver ground state under a batch of schedules.

    ``s_mid`` has shape ``(n_steps, batch)``; returns states of shape ``(batch, 2**n)``.
    """
    n = h.num_qubits
    wa, wb = _hadamard_factors(n)
    lam = driver_sign * _driver_spectrum(n)
    diag = h.diag.reshape(lam.shape)
    batch = s_mid.shape[1]

    # start in the X basis, where the driver ground state is a single basis vector
    x = np.zeros((batch,) + lam.shape, dtype=complex)
    x.reshape(batch, -1)[:, int(np.argmin(lam))] = 1.0

    for step, s in zip(lengths, s_mid):
        s = s[:, None, None]
        half = np.exp((-0.5j * step) * (1.0 - s) * lam)
        x *= half
        psi = wa @ x @ wb
        psi *= np.exp((-1j * step) * s * diag)
        x = wa @ psi @ wb
        x *= half
    psi = wa @ x @ wb
    return psi.reshape(batch, -1)


def _max_batch(n: int) -> int:
    return max(1, (1 << 18) >> n)


def evolve_many(h_f: DiagonalHamiltonian, schedules: Sequence[FourierSchedule],
                cfg: EvolutionConfig = EvolutionConfig()) -> np.ndarray:
    """Final states for several schedules sharing one annealing time, shape ``(B, 2**n)``."""
    if not schedules:
        return np.zeros((0, h_f.dim), dtype=complex)
    _check_qubits(h_f.num_qubits)
    total_time = schedules[0].total_time
    if any(s.total_time != total_time for s in schedules):
        raise DynamicsError("batched schedules must share the same total time")
    lengths, mids = time_steps(total_time, cfg.dt)
    out = []
    chunk = _max_batch(h_f.num_qubits)
    for start in range(0, len(schedules), chunk):
        part = schedules[start:start + chunk]
        s_mid = np.stack([s._values(mids) for s in part], axis=1)
        out.append(_propagate(h_f, s_mid, lengths, cfg.driver_sign))
    return np.concatenate(out)


def evolve(h_f: DiagonalHamiltonian, s: FourierSchedule,
           cfg: EvolutionConfig = EvolutionConfig()) -> np.ndarray:
    """Final state at t = T for one schedule."""
    return evolve_many(h_f, [s], cfg)[0]


def fidelity(state: np.ndarray, target: Iterable[int]) -> float:
    """Total probability on the target basis indices (e.g. a degenerate ground manifold)."""
    idx = np.fromiter(target, dtype=np.intp)
    if idx.size == 0:
        raise DynamicsError("fidelity target set is empty")
    if idx.min() < 0 or idx.max() >= state.shape[-1]:
        raise DynamicsError("target index out of range")
    return float(np.sum(np.abs(state[..., idx]) ** 2, axis=-1))


def energy(state: np.ndarray, h: DiagonalHamiltonian) -> float:
    if state.shape[-1] != h.dim:
        raise DynamicsError(f"state dimension {state.shape[-1]} != Hamiltonian dimension {h.dim}")
    return float(np.sum(np.abs(state) ** 2 * h.diag, axis=-1))


def evaluate_schedule(h_f: DiagonalHamiltonian, target: Iterable[int], s: FourierSchedule,
                      cfg: EvolutionConfig, counter: EvalCounter) -> tuple[float, float]:
    """One annealing run: returns (fidelity, energy) and bumps the counter by one."""
    state = evolve(h_f, s, cfg)
    counter.increment()
    return fidelity(state, target), energy(state, h_f)


class ScheduleEvaluator:
    """A problem and annealing time bound together: coefficients in, (fidelity, energy) out.

    Every simulated schedule increments ``counter``; optimizers only talk to
    the annealer through this object.
    """

    def __init__(self, hamiltonian: DiagonalHamiltonian, total_time: float,
                 config: EvolutionConfig | None = None, target: Iterable[int] | None = None,
                 counter: EvalCounter | None = None):
        self.hamiltonian = hamiltonian
        self.total_time = float(total_time)
        self.config = config or EvolutionConfig()
        idx = sorted(hamiltonian.ground_indices if target is None else target)
        if not idx:
            raise DynamicsError("fidelity target set is empty")
        self.target = np.array(idx, dtype=np.intp)
        self.counter = counter if counter is not None else EvalCounter()

    def schedule(self, coefficients: Sequence[float]) -> FourierSchedule:
        return FourierSchedule(self.total_time, tuple(coefficients))

    def __call__(self, coefficients: Sequence[float]) -> tuple[float, float]:
        return self.evaluate_many([coefficients])[0]

    def evaluate_many(self, coefficient_sets: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
        if len(coefficient_sets) == 0:
            return []
        states = evolve_many(self.hamiltonian, [self.schedule(c) for c in coefficient_sets],
                             self.config)
        self.counter.increment(len(coefficient_sets))
        probs = np.abs(states) ** 2
        fids = probs[:, self.target].sum(axis=1)
        energies = probs @ self.hamiltonian.diag
        return [(float(f), float(e)) for f, e in zip(fids, energies)]
