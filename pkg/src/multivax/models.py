"""Right-hand sides for the whole model family from one (m classes, k vaccines) kernel.

Class ``a`` feels infection from every class ``alpha`` through

* ``rho_S[a, alpha]`` on its susceptibles,
* ``vaccine_profiles[a][i][alpha](tau)`` on vaccine line ``i``,
* ``recovered_profiles[a][alpha](tau)`` on its recovered line,

each multiplied by ``I[alpha]``.  The single-class systems (plain SIR,
SIR with a recovered delay line, one or several vaccines, never-expiring
immunity) are the ``m == 1`` configurations built by :func:`make_preset`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .profiles import (
    ConstantProfile,
    EfficacyProfile,
    PlateauProfile,
    ShapedProfile,
    ShapeFn,
    unbounded,
)
from .state import ClassState, DelayLine, SystemState


@dataclass(frozen=True)
class LineWeights:
    """Profile values sampled on the left edges of a line's cells, one row per ``alpha``."""

    cells: np.ndarray  # (m, n_cells)
    tail: np.ndarray  # (m,), rate applied to the lumped tail of unbounded lines
    horizon: float
    ramp_end: float

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.horizon)

    def empty_line(self, dt: float) -> DelayLine:
        return DelayLine(np.zeros(self.cells.shape[1]), dt, self.horizon)


@dataclass
class ModelSpec:
    rho_S: np.ndarray
    theta: np.ndarray
    mu: np.ndarray
    vaccine_profiles: Sequence[Sequence[Sequence[EfficacyProfile]]]
    recovered_profiles: Sequence[Sequence[EfficacyProfile]]
    name: str = "custom"
    _weights: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.rho_S = np.atleast_2d(np.asarray(self.rho_S, dtype=float))
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        m = self.rho_S.shape[0]
        if self.rho_S.shape != (m, m) or self.theta.shape != (m,) or self.mu.shape != (m,):
            raise ValueError("rho_S must be m x m and theta, mu length m")
        if np.any(self.rho_S < 0) or np.any(self.theta < 0) or np.any(self.mu < 0):
            raise ValueError("rates must be nonnegative")
        if np.any(self.theta + self.mu <= 0):
            raise ValueError("theta + mu must be positive in every class")
        if len(self.vaccine_profiles) != m or len(self.recovered_profiles) != m:
            raise ValueError("need one profile list per class")
        k = len(self.vaccine_profiles[0])
        for a in range(m):
            if len(self.vaccine_profiles[a]) != k:
                raise ValueError("every class needs the same number of vaccines")
            for i in range(k):
                _check_row(self.vaccine_profiles[a][i], m, f"vaccine {i + 1}, class {a + 1}")
            _check_row(self.recovered_profiles[a], m, f"recovered line, class {a + 1}")

    @property
    def m(self) -> int:
        return self.rho_S.shape[0]

    @property
    def k(self) -> int:
        return len(self.vaccine_profiles[0])

    @classmethod
    def single_class(
        cls,
        rho_S: float,
        theta: float,
        mu: float,
        vaccines: Sequence[EfficacyProfile],
        recovered: EfficacyProfile,
        name: str = "custom",
    ) -> "ModelSpec":
        return cls(
            np.array([[rho_S]]),
            np.array([theta]),
            np.array([mu]),
            [[[v] for v in vaccines]],
            [[recovered]],
            name,
        )

    def weights(self, dt: float) -> tuple[list[list[LineWeights]], list[LineWeights]]:
        """Sampled profiles for mesh ``dt``: ``(vaccine[a][i], recovered[a])``, cached."""
        if dt not in self._weights:
            vac = [[_sample(row, dt) for row in per_class] for per_class in self.vaccine_profiles]
            rec = [_sample(row, dt) for row in self.recovered_profiles]
            self._weights[dt] = (vac, rec)
        return self._weights[dt]

    def initial_state(self, S: Sequence[float], I: Sequence[float], dt: float) -> SystemState:
        """Susceptible/infected datum with every delay line empty."""
        S = np.atleast_1d(np.asarray(S, dtype=float))
        I = np.atleast_1d(np.asarray(I, dtype=float))
        if S.shape != (self.m,) or I.shape != (self.m,):
            raise ValueError(f"initial S and I need {self.m} entries")
        if np.any(S < 0) or np.any(I < 0):
            raise ValueError("initial populations must be nonnegative")
        vac, rec = self.weights(dt)
        classes = [
            ClassState(
                float(S[a]),
                float(I[a]),
                [w.empty_line(dt) for w in vac[a]],
                rec[a].empty_line(dt),
                0.0,
                np.zeros(self.k),
            )
            for a in range(self.m)
        ]
        return SystemState(0.0, classes)


def _check_row(row: Sequence[EfficacyProfile], m: int, what: str) -> None:
    if len(row) != m:
        raise ValueError(f"{what}: need one profile per infecting class")
    horizons = {p.horizon for p in row}
    if len(horizons) != 1:
        raise ValueError(f"{what}: all cross-class profiles must share one horizon")
    if any(p.floor < 0 for p in row):
        raise ValueError(f"{what}: negative rates")


def _sample(row: Sequence[EfficacyProfile], dt: float) -> LineWeights:
    horizon = row[0].horizon
    if math.isinf(horizon):
        ramp_end = max(p.ramp_end for p in row)
        n = int(math.ceil(ramp_end / dt - 1e-9)) + 1 if ramp_end > 0 else 1
        tau = np.arange(n) * dt
        cells = np.vstack([p(tau) for p in row])
        tail = np.array([p(n * dt) for p in row])
    else:
        if dt > horizon:
            raise ValueError(f"dt={dt} exceeds line horizon {horizon}")
        n = max(1, int(math.ceil(horizon / dt - 1e-9)))
        tau = np.minimum(np.arange(n) * dt, horizon)
        cells = np.vstack([p(tau) for p in row])
        tail = np.zeros(len(row))
        ramp_end = max(p.ramp_end for p in row)
    return LineWeights(cells, tail, horizon, ramp_end)


def pressure_matrix(spec: ModelSpec, s: SystemState) -> np.ndarray:
    """``N[a, alpha]``: infection inflow to class ``a`` per infected of class ``alpha``.

    ``N[a, alpha] = rho_S S_a + sum_i int rho_i V_ia + int rho_R R_a`` with the
    left-Riemann rule of the upwind grid.
    """
    vac, rec = spec.weights(s.dt)
    N = np.empty((spec.m, spec.m))
    for a, c in enumerate(s.classes):
        row = spec.rho_S[a] * c.S
        for w, line in zip(vac[a], c.vaccine_lines):
            row = row + _line_integral(w, line)
        row = row + _line_integral(rec[a], c.recovered_line)
        N[a] = row
    return N


def _line_integral(w: LineWeights, line: DelayLine) -> np.ndarray:
    return (w.cells @ line.density) * line.dt + w.tail * line.lumped_tail


def infection_pressure(spec: ModelSpec, s: SystemState) -> np.ndarray:
    """New infections per day in each class."""
    I = np.array([c.I for c in s.classes])
    return pressure_matrix(spec, s) @ I


@dataclass
class StateDerivative:
    dS: np.ndarray  # (m,)
    dI: np.ndarray  # (m,)
    vaccine_sources: list[list[np.ndarray]]  # density/day per cell, -rho(tau) V I
    vaccine_tail_sources: np.ndarray  # (m, k) individuals/day lost from lumped tails
    recovered_sources: list[np.ndarray]
    recovered_tail_sources: np.ndarray  # (m,)
    vaccine_inflow: np.ndarray  # (m, k) V_i(t, 0)
    recovered_inflow: np.ndarray  # (m,) R(t, 0) = theta I
    vaccine_expiry: np.ndarray  # (m, k) V_i(t, T_i); zero on unbounded lines
    recovered_expiry: np.ndarray  # (m,)

    def living_rate(self, dt: float) -> float:
        """d/dt of the living total implied by the assembled pieces."""
        lines = sum(float(src.sum()) * dt for row in self.vaccine_sources for src in row)
        lines += sum(float(src.sum()) * dt for src in self.recovered_sources)
        lines += float(self.vaccine_tail_sources.sum() + self.recovered_tail_sources.sum())
        boundary = float(self.vaccine_inflow.sum() + self.recovered_inflow.sum())
        expiry = float(self.vaccine_expiry.sum() + self.recovered_expiry.sum())
        return float(self.dS.sum() + self.dI.sum()) + lines + boundary - expiry


def assemble_rhs(spec: ModelSpec, s: SystemState, dose_rates: np.ndarray) -> StateDerivative:
    dose_rates = np.asarray(dose_rates, dtype=float).reshape(spec.m, spec.k)
    if np.any(dose_rates < 0):
        raise ValueError("dose rates must be nonnegative")
    vac, rec = spec.weights(s.dt)
    I = np.array([c.I for c in s.classes])
    m, k = spec.m, spec.k
    dS = np.empty(m)
    dI = np.empty(m)
    v_src, r_src = [], []
    v_tail = np.zeros((m, k))
    r_tail = np.zeros(m)
    v_exp = np.zeros((m, k))
    r_exp = np.zeros(m)
    N = pressure_matrix(spec, s)
    for a, c in enumerate(s.classes):
        row = []
        for i, (w, line) in enumerate(zip(vac[a], c.vaccine_lines)):
            row.append(-line.density * (I @ w.cells))
            if w.unbounded:
                v_tail[a, i] = -line.lumped_tail * (I @ w.tail)
            else:
                v_exp[a, i] = line.density[-1]
        v_src.append(row)
        w, line = rec[a], c.recovered_line
        r_src.append(-line.density * (I @ w.cells))
        if w.unbounded:
            r_tail[a] = -line.lumped_tail * (I @ w.tail)
        else:
            r_exp[a] = line.density[-1]
        force_S = spec.rho_S[a] @ I
        dS[a] = -force_S * c.S + v_exp[a].sum() + r_exp[a] - dose_rates[a].sum()
        dI[a] = N[a] @ I - (spec.theta[a] + spec.mu[a]) * c.I
    return StateDerivative(
        dS,
        dI,
        v_src,
        v_tail,
        r_src,
        r_tail,
        dose_rates.copy(),
        spec.theta * I,
        v_exp,
        r_exp,
    )


# --- presets ---------------------------------------------------------------

RHO_S = 1.0e-3
THETA = 4.0e-2
MU = 2.0e-3
RHO_V_FLOOR = 1.0e-5
RHO_R_FLOOR = 2.0e-5
T_V = 180.0
T_R = 180.0

PRESETS = (
    "sir4",
    "sir5",
    "single_vaccine",
    "infinite_TV",
    "infinite_TR",
    "two_vaccines",
    "two_classes",
)


def single_vaccine_model(
    rho_S: float = RHO_S,
    theta: float = THETA,
    mu: float = MU,
    T_V: float = T_V,
    rho_V_floor: float = RHO_V_FLOOR,
    T_R: float = T_R,
    rho_R_floor: float = RHO_R_FLOOR,
    vaccine: bool = True,
    infinite_TV: bool = False,
    infinite_TR: bool = False,
    name: str = "single_vaccine",
) -> ModelSpec:
    recovered: EfficacyProfile = ShapedProfile(rho_S, rho_R_floor, T_R, ShapeFn.PHI)
    if infinite_TR:
        recovered = unbounded(recovered)
    vaccines: list[EfficacyProfile] = []
    if vaccine:
        v: EfficacyProfile = ShapedProfile(rho_S, rho_V_floor, T_V, ShapeFn.PSI)
        vaccines.append(unbounded(v) if infinite_TV else v)
    return ModelSpec.single_class(rho_S, theta, mu, vaccines, recovered, name)


def sir_model(rho_S: float = RHO_S, theta: float = THETA, mu: float = MU) -> ModelSpec:
    # recovered individuals never leave and are never reinfected
    return ModelSpec.single_class(rho_S, theta, mu, [], ConstantProfile(0.0), "sir4")


# Vaccine 1 gives weak protection: 6.0e-4 reproduces its single-vaccine
# deaths and doses, while 6.0e-6 would make it almost perfect.
VACCINE_1_LEVEL = 6.0e-4
VACCINE_2_LEVEL = 5.0e-7


def two_vaccines_model(
    rho_S: float = RHO_S,
    theta: float = THETA,
    mu: float = MU,
    level_1: float = VACCINE_1_LEVEL,
    level_2: float = VACCINE_2_LEVEL,
    T_R: float = T_R,
    rho_R_floor: float = RHO_R_FLOOR,
) -> ModelSpec:
    v1 = PlateauProfile(rho_S, level_1, 3.0, 297.0, 300.0)
    v2 = PlateauProfile(rho_S, level_2, 30.0, 90.0, 120.0)
    rec = ShapedProfile(rho_S, rho_R_floor, T_R, ShapeFn.PHI)
    return ModelSpec.single_class(rho_S, theta, mu, [v1, v2], rec, "two_vaccines")


TWO_CLASS_RHO_S = ((3.0e-3, 1.0e-3), (2.0e-3, 1.0e-3))


def two_classes_model(
    rho_S: Sequence[Sequence[float]] = TWO_CLASS_RHO_S,
    theta: Sequence[float] = (6.0e-2, 4.0e-2),
    mu: Sequence[float] = (5.0e-4, 2.0e-3),
    T_V: Sequence[float] = (200.0, 160.0),
    T_R: Sequence[float] = (180.0, 140.0),
    rho_V_floor: float = RHO_V_FLOOR,
    rho_R_floor: float = RHO_R_FLOOR,
    recovered_shape: str = "phi",
) -> ModelSpec:
    rho = np.asarray(rho_S, dtype=float)
    m = rho.shape[0]
    vac = [
        [[ShapedProfile(rho[a, al], rho_V_floor, T_V[a], ShapeFn.PSI) for al in range(m)]]
        for a in range(m)
    ]
    rec = [
        [ShapedProfile(rho[a, al], rho_R_floor, T_R[a], ShapeFn(recovered_shape)) for al in range(m)]
        for a in range(m)
    ]
    return ModelSpec(rho, theta, mu, vac, rec, "two_classes")


INITIAL = {
    "single": ((95.0,), (5.0,)),
    "two_classes": ((42.0, 53.0), (1.0, 4.0)),
}


def preset_model(name: str, **overrides) -> ModelSpec:
    if name == "sir4":
        return sir_model(**overrides)
    if name == "sir5":
        return single_vaccine_model(vaccine=False, name="sir5", **overrides)
    if name == "single_vaccine":
        return single_vaccine_model(**overrides)
    if name == "infinite_TV":
        return single_vaccine_model(infinite_TV=True, name="infinite_TV", **overrides)
    if name == "infinite_TR":
        return single_vaccine_model(infinite_TR=True, name="infinite_TR", **overrides)
    if name == "two_vaccines":
        return two_vaccines_model(**overrides)
    if name == "two_classes":
        return two_classes_model(**overrides)
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def preset_initial(name: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}")
    return INITIAL["two_classes" if name == "two_classes" else "single"]


def make_preset(name: str, dt: float = 0.05, **overrides) -> tuple[ModelSpec, SystemState]:
    spec = preset_model(name, **overrides)
    S, I = preset_initial(name)
    return spec, spec.initial_state(S, I, dt)
