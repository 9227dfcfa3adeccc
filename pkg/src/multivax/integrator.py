"""Upwind transport on ``tau`` plus forward Euler on the sources, one shared step ``dt``.

With unit speed and the same step on ``t`` and ``tau`` the upwind scheme is
an exact shift by one cell, so delay lines are advanced by shifting arrays.
Every flux is moved between compartments as a matched pair, which keeps

    living(t + dt) - living(t) = -sum_a mu_a I_a dt

to round-off.  When forward Euler would take more out of a cell than it
holds, the cell is emptied and the shortfall is booked in
``SystemState.clamped_deficit`` (the receiving compartment gets only what
was actually removed).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec, assemble_rhs, pressure_matrix
from .state import DelayLine, Mesh, SystemState
from .strategies import StrategySpec, dose_request

log = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    """A non-finite or impossible value appeared during a step."""


def advect(line: DelayLine, dt: float) -> tuple[DelayLine, float]:
    """Shift ``line`` one cell toward larger ``tau``.

    Returns the shifted line (cell 0 empty) and the mass released at the
    terminal boundary; unbounded lines release nothing and grow their tail.
    """
    if abs(dt - line.dt) > 1e-12 * line.dt:
        raise ValueError(f"mesh mismatch: step {dt} on a line with cell size {line.dt}")
    out = line.copy()
    expiry = _shift(out)
    return out, expiry


def _shift(line: DelayLine) -> float:
    d = line.density
    last = float(d[-1]) * line.dt
    d[1:] = d[:-1]
    d[0] = 0.0
    if line.unbounded:
        line.lumped_tail += last
        return 0.0
    return last


def _decay(line: DelayLine, src: np.ndarray, tail_src: float, dt: float) -> tuple[float, float]:
    """Apply Euler sources in place; return (mass removed, clamped deficit)."""
    d = line.density
    before = float(d.sum())
    d += dt * src
    deficit = 0.0
    if d.size and d.min() < 0.0:
        neg = d < 0.0
        deficit = -float(d[neg].sum()) * line.dt
        d[neg] = 0.0
    removed = (before - float(d.sum())) * line.dt
    if tail_src:
        new_tail = line.lumped_tail + dt * tail_src
        if new_tail < 0.0:
            deficit += -new_tail
            new_tail = 0.0
        removed += line.lumped_tail - new_tail
        line.lumped_tail = new_tail
    return removed, deficit


@dataclass
class TimeSeries:
    """Samples of a run at the output stride; arrays are indexed ``[sample, class, ...]``."""

    m: int
    k: int
    t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    S: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    I: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    V: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 0)))
    R: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    r0: np.ndarray = field(default_factory=lambda: np.zeros(0))
    dIdt: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    cum_deaths: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    cum_doses: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 0)))
    living: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    clamped_deficit: np.ndarray = field(default_factory=lambda: np.zeros(0))
    label: str = ""

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def total_deaths(self) -> float:
        return float(self.cum_deaths[-1].sum()) if self.n else 0.0

    @property
    def total_doses(self) -> np.ndarray:
        return self.cum_doses[-1].sum(axis=0) if self.n else np.zeros(self.k)


class _Recorder:
    def __init__(self, m: int, k: int):
        self.m, self.k = m, k
        self.rows: dict[str, list] = {name: [] for name in _FIELDS}

    def record(self, spec: ModelSpec, state: SystemState) -> None:
        N = pressure_matrix(spec, state)
        I = np.array([c.I for c in state.classes])
        rows = self.rows
        rows["t"].append(state.t)
        rows["S"].append([c.S for c in state.classes])
        rows["I"].append(I)
        rows["V"].append([[v.mass() for v in c.vaccine_lines] for c in state.classes])
        rows["R"].append([c.recovered_line.mass() for c in state.classes])
        rows["r0"].append(N[0, 0] / (spec.theta[0] + spec.mu[0]) if spec.m == 1 else np.nan)
        rows["dIdt"].append(N @ I - (spec.theta + spec.mu) * I)
        rows["cum_deaths"].append([c.cum_deaths for c in state.classes])
        rows["cum_doses"].append([c.cum_doses.copy() for c in state.classes])
        rows["living"].append([c.living() for c in state.classes])
        rows["clamped_deficit"].append(state.clamped_deficit)

    def series(self, label: str = "") -> TimeSeries:
        m, k, n = self.m, self.k, len(self.rows["t"])
        shapes = {
            "t": (n,),
            "S": (n, m),
            "I": (n, m),
            "V": (n, m, k),
            "R": (n, m),
            "r0": (n,),
            "dIdt": (n, m),
            "cum_deaths": (n, m),
            "cum_doses": (n, m, k),
            "living": (n, m),
            "clamped_deficit": (n,),
        }
        arrays = {
            name: np.asarray(vals, dtype=float).reshape(shapes[name]) for name, vals in self.rows.items()
        }
        return TimeSeries(m, k, label=label, **arrays)


_FIELDS = ("t", "S", "I", "V", "R", "r0", "dIdt", "cum_deaths", "cum_doses", "living", "clamped_deficit")


def _advance(spec: ModelSpec, state: SystemState, strategy, dt: float) -> None:
    """One step in place.  ``strategy`` is a StrategySpec or any object with
    ``request(t, state, r0, spec, dt)`` (used by feedback controllers that
    need the model)."""
    t = state.t
    r0 = None
    if spec.m == 1:
        N = pressure_matrix(spec, state)
        r0 = float(N[0, 0] / (spec.theta[0] + spec.mu[0]))
    if hasattr(strategy, "request"):
        req = np.asarray(strategy.request(t, state, r0, spec, dt), dtype=float).reshape(spec.m, spec.k)
    else:
        req = dose_request(strategy, t, state, r0)
    deriv = assemble_rhs(spec, state, req)
    if not (np.all(np.isfinite(deriv.dS)) and np.all(np.isfinite(deriv.dI))):
        raise NumericalFailure(f"non-finite derivative at t={t:.6g}: dS={deriv.dS}, dI={deriv.dI}")

    I_old = np.array([c.I for c in state.classes])
    for a, c in enumerate(state.classes):
        deficit = 0.0
        from_lines = 0.0
        expired = 0.0
        for i, line in enumerate(c.vaccine_lines):
            removed, dfc = _decay(line, deriv.vaccine_sources[a][i], deriv.vaccine_tail_sources[a, i], dt)
            from_lines += removed
            deficit += dfc
            expired += _shift(line)
        removed, dfc = _decay(c.recovered_line, deriv.recovered_sources[a], deriv.recovered_tail_sources[a], dt)
        from_lines += removed
        deficit += dfc
        expired += _shift(c.recovered_line)

        infected_S = float(spec.rho_S[a] @ I_old) * c.S * dt
        doses = req[a].copy()
        S_new = c.S - infected_S + expired - doses.sum() * dt
        if S_new < 0.0:
            # corrector: lower this class's doses so S lands exactly on zero
            wanted = doses.sum()
            allowed = max(0.0, wanted + S_new / dt)
            doses = doses * (allowed / wanted) if wanted > 0 else doses
            S_new = c.S - infected_S + expired - doses.sum() * dt
            if allowed > 0.0 or abs(S_new) <= 1e-12 * max(1.0, c.S):
                S_new = 0.0
            if S_new < 0.0:
                # infection alone would overdraw S
                deficit += -S_new
                infected_S += S_new
                S_new = 0.0

        recovered = spec.theta[a] * c.I * dt
        died = spec.mu[a] * c.I * dt
        I_new = c.I + infected_S + from_lines - recovered - died
        if not np.isfinite(S_new) or not np.isfinite(I_new) or I_new < 0.0:
            raise NumericalFailure(
                f"step from t={t:.6g} failed in class {a + 1}: S={float(S_new):.6g}, I={float(I_new):.6g}; "
                f"dt={dt} may be too large"
            )
        for i, line in enumerate(c.vaccine_lines):
            line.density[0] = doses[i]
        c.recovered_line.density[0] = recovered / dt
        c.S = S_new
        c.I = I_new
        c.cum_deaths += died
        c.cum_doses = c.cum_doses + doses * dt
        state.clamped_deficit += deficit
    state.t = t + dt


def step(spec: ModelSpec, state: SystemState, strategy: StrategySpec, dt: float) -> SystemState:
    """Return the state one step ``dt`` later; ``state`` is left untouched."""
    if abs(dt - state.dt) > 1e-12 * dt:
        raise ValueError(f"mesh mismatch: step {dt} on lines built for {state.dt}")
    new = state.copy()
    _advance(spec, new, strategy, dt)
    return new


def run(spec: ModelSpec, initial: SystemState, strategy: StrategySpec, mesh: Mesh, label: str = "") -> TimeSeries:
    """Integrate from ``initial`` to ``mesh.horizon_T``, sampling every ``mesh.stride`` days."""
    if abs(mesh.dt - initial.dt) > 1e-12 * mesh.dt:
        raise ValueError(f"initial state built for dt={initial.dt}, mesh has dt={mesh.dt}")
    state = initial.copy()
    rec = _Recorder(spec.m, spec.k)
    every = mesh.steps_per_output
    n_steps = mesh.n_steps
    for n in range(n_steps):
        if n % every == 0:
            rec.record(spec, state)
        _advance(spec, state, strategy, mesh.dt)
        # keep t on the grid rather than accumulating round-off
        state.t = (n + 1) * mesh.dt
    rec.record(spec, state)
    series = rec.series(label)
    if series.clamped_deficit[-1] > 0:
        log.info("%s: clamped deficit %.3e", label or spec.name, series.clamped_deficit[-1])
    return series
