"""Fourier-parameterized annealing schedules and the discrete coefficient grid."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class FourierSchedule:
    """``s(t) = t/T + sum_k x_k sin(pi k t / T)`` for ``k = 1..M``.

    The sine terms vanish at both ends, so ``s(0) = 0`` and ``s(T) = 1`` for
    any coefficients.  Values in between are not clamped to [0, 1].
    """

    total_time: float
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.total_time > 0:
            raise ScheduleError(f"total_time must be positive, got {self.total_time}")
        object.__setattr__(self, "total_time", float(self.total_time))
        object.__setattr__(self, "coefficients", tuple(float(x) for x in self.coefficients))

    @classmethod
    def linear(cls, total_time: float) -> FourierSchedule:
        return cls(total_time, ())

    @property
    def num_frequencies(self) -> int:
        return len(self.coefficients)

    def evaluate(self, t):
        """Schedule value at time(s) ``t``; raises if any ``t`` lies outside [0, T]."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.total_time):
            raise ScheduleError(f"t outside [0, {self.total_time}]")
        return self._values(t_arr) if t_arr.ndim else float(self._values(t_arr))

    __call__ = evaluate

    def _values(self, t: np.ndarray) -> np.ndarray:
        u = t / self.total_time
        if not self.coefficients:
            return u
        k = np.arange(1, self.num_frequencies + 1)
        x = np.asarray(self.coefficients)
        return u + np.sin(np.pi * np.multiply.outer(u, k)) @ x

    def to_record(self) -> dict:
        return {"T": self.total_time, "x": list(self.coefficients)}

    @classmethod
    def from_record(cls, record: dict) -> FourierSchedule:
        return cls(record["T"], tuple(record.get("x", ())))


def evaluate(s: FourierSchedule, t):
    return s.evaluate(t)


@dataclass(frozen=True)
class ActionGrid:
    """``num_values`` evenly spaced coefficient values from ``lo`` to ``hi`` inclusive.

    With the default 40 values, zero is not a grid point.
    """

    num_values: int = 40
    lo: float = -0.2
    hi: float = 0.2

    def __post_init__(self):
        if self.num_values < 2:
            raise ScheduleError("an action grid needs at least two values")
        if not self.lo < self.hi:
            raise ScheduleError(f"grid bounds must satisfy lo < hi, got {self.lo}, {self.hi}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.num_values)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.num_values - 1)

    def __len__(self):
        return self.num_values

    def coefficients(self, indices: Sequence[int]) -> tuple[float, ...]:
        values = self.values
        out = []
        for idx in indices:
            if not 0 <= idx < self.num_values:
                raise ScheduleError(f"grid index {idx} out of range [0, {self.num_values})")
            out.append(float(values[idx]))
        return tuple(out)


def from_actions(indices: Sequence[int], grid: ActionGrid, total_time: float) -> FourierSchedule:
    """Schedule whose k-th coefficient is the grid value picked by the k-th move."""
    return FourierSchedule(total_time, grid.coefficients(indices))
