"""Discretized system state and the single mesh shared by ``t`` and ``tau``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def cell_count(horizon: float, dt: float) -> int:
    """Number of upwind cells covering [0, horizon) with step ``dt``."""
    return max(1, int(math.ceil(horizon / dt - 1e-9)))


@dataclass(frozen=True)
class Mesh:
    dt: float = 0.05
    horizon_T: float = 730.0
    stride: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.horizon_T > 0:
            raise ValueError(f"horizon_T must be positive, got {self.horizon_T}")
        if not self.stride > 0:
            raise ValueError(f"output stride must be positive, got {self.stride}")
        if abs(self.stride / self.dt - round(self.stride / self.dt)) > 1e-9:
            raise ValueError("output stride must be a multiple of dt")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon_T / self.dt))

    @property
    def steps_per_output(self) -> int:
        return int(round(self.stride / self.dt))

    def check_line_horizon(self, horizon: float) -> None:
        if not math.isinf(horizon) and self.dt > horizon:
            raise ValueError(f"dt={self.dt} exceeds delay-line horizon {horizon}")


@dataclass
class DelayLine:
    """Density over age-since-event cells ``[j*dt, (j+1)*dt)``.

    Finite lines have ``ceil(horizon/dt)`` cells and release their last cell
    at each step.  Unbounded lines keep ``ceil(ramp_end/dt) + 1`` resolved
    cells and pile everything older into ``lumped_tail`` (individuals).
    """

    density: np.ndarray
    dt: float
    horizon: float
    lumped_tail: float = 0.0

    @classmethod
    def empty(cls, horizon: float, dt: float, ramp_end: float = 0.0) -> "DelayLine":
        if math.isinf(horizon):
            n = cell_count(ramp_end, dt) + 1 if ramp_end > 0 else 1
        else:
            n = cell_count(horizon, dt)
        return cls(np.zeros(n), dt, horizon)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.horizon)

    @property
    def n_cells(self) -> int:
        return self.density.shape[0]

    @property
    def tau(self) -> np.ndarray:
        return np.arange(self.n_cells) * self.dt

    def mass(self) -> float:
        return line_mass(self)

    def copy(self) -> "DelayLine":
        return DelayLine(self.density.copy(), self.dt, self.horizon, self.lumped_tail)


@dataclass
class ClassState:
    S: float
    I: float
    vaccine_lines: list[DelayLine]
    recovered_line: DelayLine
    cum_deaths: float = 0.0
    cum_doses: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def living(self) -> float:
        return (
            self.S
            + self.I
            + sum(line_mass(v) for v in self.vaccine_lines)
            + line_mass(self.recovered_line)
        )

    def copy(self) -> "ClassState":
        return ClassState(
            self.S,
            self.I,
            [v.copy() for v in self.vaccine_lines],
            self.recovered_line.copy(),
            self.cum_deaths,
            self.cum_doses.copy(),
        )


@dataclass
class SystemState:
    t: float
    classes: list[ClassState]
    # mass that forward Euler tried to remove beyond what a cell held
    clamped_deficit: float = 0.0

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def k(self) -> int:
        return len(self.classes[0].vaccine_lines) if self.classes else 0

    @property
    def dt(self) -> float:
        return self.classes[0].recovered_line.dt

    def copy(self) -> "SystemState":
        return SystemState(self.t, [c.copy() for c in self.classes], self.clamped_deficit)


def line_mass(l: DelayLine) -> float:
    """Left-Riemann mass of a delay line, tail bucket included."""
    return float(l.density.sum()) * l.dt + l.lumped_tail


def total_population(s: SystemState) -> float:
    """Living individuals summed over classes (cumulative deaths excluded)."""
    return sum(c.living() for c in s.classes)
