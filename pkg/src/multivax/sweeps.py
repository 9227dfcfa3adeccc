"""Parameter sweeps and the strategy comparisons behind the result tables.

Runs are independent, so they can be spread over worker processes; results
always come back in the order the runs were declared.
"""
from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .integrator import TimeSeries, run
from .observables import deaths
from .scenario_io import Scenario
from .state import Mesh
from .strategies import (
    AgeClassFirst,
    AgeFeedback,
    AgeHalfHalf,
    R0Feedback,
    SplitSchedule,
    StrategySpec,
    Threshold,
    VaccineSchedule,
    Zero,
)

THRESHOLDS = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0)
FEEDBACK_P = (0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
FEEDBACK_R = (0.25, 0.5, 1.0)

TWO_VACCINE_SUITE: dict[str, StrategySpec] = {
    "ref.": Zero(),
    "(11)": VaccineSchedule(((0, 30.0, 730.0),)),
    "(12)": VaccineSchedule(((0, 30.0, 380.0), (1, 380.0, 730.0))),
    "(21)": VaccineSchedule(((1, 30.0, 380.0), (0, 380.0, 730.0))),
    "(22)": VaccineSchedule(((1, 30.0, 730.0),)),
    "(1/2)": SplitSchedule(),
}
TWO_CLASS_SUITE: dict[str, StrategySpec] = {
    "Reference": Zero(),
    "Feedback": AgeFeedback(),
    "Half-Half": AgeHalfHalf(),
    "Class 2 First": AgeClassFirst(1),
    "Class 1 First": AgeClassFirst(0),
}
SUITES = {"two_vaccines": TWO_VACCINE_SUITE, "two_classes": TWO_CLASS_SUITE}


@dataclass
class RunSummary:
    """What a sweep keeps from one run (the full series stays in the worker)."""

    label: str
    deaths: float
    deaths_by_class: np.ndarray
    doses_by_class: np.ndarray  # [class, vaccine]
    conservation_error: float
    clamped_deficit: float
    sign_violations: int
    final_time: float

    @property
    def doses_per_vaccine(self) -> np.ndarray:
        return self.doses_by_class.sum(axis=0)

    @property
    def doses(self) -> float:
        return float(self.doses_by_class.sum())


def sign_violations(series: TimeSeries, band: float = 1e-12) -> int:
    """Samples where ``sign(dI/dt) != sign(r0 - 1)``; near-ties inside ``band`` are skipped."""
    if series.m != 1:
        return 0
    dI = series.dIdt[:, 0]
    x = series.r0 - 1.0
    scale = np.maximum(1.0, np.abs(series.I[:, 0]))
    decided = (np.abs(x) > band) & (np.abs(dI) > band * scale)
    return int(np.sum(decided & (np.sign(dI) != np.sign(x))))


def summarize(series: TimeSeries) -> RunSummary:
    d, discrepancy = deaths(series, float(series.t[0]), float(series.t[-1]))
    return RunSummary(
        label=series.label,
        deaths=d,
        deaths_by_class=series.cum_deaths[-1] - series.cum_deaths[0],
        doses_by_class=series.cum_doses[-1] - series.cum_doses[0],
        conservation_error=abs(discrepancy),
        clamped_deficit=float(series.clamped_deficit[-1]),
        sign_violations=sign_violations(series),
        final_time=float(series.t[-1]),
    )


def run_scenario(scn: Scenario, label: str | None = None) -> TimeSeries:
    spec, state, strategy = scn.build()
    return run(spec, state, strategy, scn.mesh, label or scn.name or spec.name)


def _run_summary(job: tuple[Scenario, str]) -> RunSummary:
    scn, label = job
    return summarize(run_scenario(scn, label))


def run_many(jobs: Sequence[tuple[Scenario, str]], workers: int = 1) -> list[RunSummary]:
    """Run ``(scenario, label)`` jobs and return summaries in the given order."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [_run_summary(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_summary, jobs))


def base_scenario(preset: str, dt: float = 0.05, horizon_T: float = 730.0) -> Scenario:
    from .models import preset_initial

    S0, I0 = preset_initial(preset)
    return Scenario(preset, (), tuple(S0), tuple(I0), Mesh(dt=dt, horizon_T=horizon_T))


def _with_strategy(scn: Scenario, strategy: StrategySpec) -> Scenario:
    return Scenario(scn.preset, scn.model, scn.S0, scn.I0, scn.mesh, strategy, scn.output_dir, scn.series, scn.name)


def sweep_threshold(
    values: Sequence[float] = THRESHOLDS, base: Scenario | None = None, workers: int = 1
) -> list[RunSummary]:
    base = base or base_scenario("single_vaccine")
    jobs = [(_with_strategy(base, Threshold(float(v))), f"S_star={v:g}") for v in values]
    return run_many(jobs, workers)


def sweep_feedback(
    p_values: Sequence[float] = FEEDBACK_P,
    r_values: Sequence[float] = FEEDBACK_R,
    base: Scenario | None = None,
    workers: int = 1,
) -> list[list[RunSummary]]:
    """Grid indexed ``[p][r]``."""
    base = base or base_scenario("single_vaccine")
    jobs = [
        (_with_strategy(base, R0Feedback(float(p), float(r))), f"p_star={p:g},r_star={r:g}")
        for p in p_values
        for r in r_values
    ]
    flat = run_many(jobs, workers)
    nr = len(r_values)
    return [flat[i * nr : (i + 1) * nr] for i in range(len(p_values))]


def run_strategy_suite(family: str, dt: float = 0.05, workers: int = 1) -> dict[str, RunSummary]:
    if family not in SUITES:
        raise KeyError(f"unknown suite {family!r}; choose from {', '.join(SUITES)}")
    base = base_scenario(family, dt=dt)
    suite = SUITES[family]
    results = run_many([(_with_strategy(base, s), name) for name, s in suite.items()], workers)
    return dict(zip(suite, results))


def vary_values(spec: str) -> tuple[str, list[float]]:
    """Parse ``section.key=a:b:step`` (inclusive of ``b``) or ``section.key=v1,v2,...``."""
    key, sep, rng = spec.partition("=")
    if not sep or "." not in key:
        raise ValueError(f"expected section.key=a:b:step, got {spec!r}")
    if ":" in rng:
        parts = [float(x) for x in rng.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"bad range {rng!r}: need a:b:step with a <= b and step > 0")
        a, b, h = parts
        n = int(np.floor((b - a) / h + 1e-9)) + 1
        return key, [round(a + i * h, 12) for i in range(n)]
    return key, [float(x) for x in rng.split(",")]


def grid(base: Scenario, vary: Sequence[str]) -> list[tuple[dict[str, float], Scenario]]:
    """Cartesian product of ``--vary`` specs applied to ``base``."""
    axes = [vary_values(v) for v in vary]
    out = []
    for combo in itertools.product(*[vals for _, vals in axes]):
        point = dict(zip([k for k, _ in axes], combo))
        scn = base
        for k, v in point.items():
            scn = scn.with_value(k, v)
        out.append((point, scn))
    return out


# --- table writers ---------------------------------------------------------


def _g(x: float) -> str:
    return format(float(x), ".9g")


def _write(path: Path, rows: list[list]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    return path


def write_table1(results: Sequence[RunSummary], values: Sequence[float], out: Path) -> Path:
    return _write(
        Path(out) / "table1.csv",
        [
            ["S_star", *[_g(v) for v in values]],
            ["Deaths", *[_g(r.deaths) for r in results]],
            ["Doses", *[_g(r.doses) for r in results]],
        ],
    )


def write_table2(
    grid_: Sequence[Sequence[RunSummary]], p_values: Sequence[float], r_values: Sequence[float], out: Path
) -> tuple[Path, Path]:
    paths = []
    for name, get in (("deaths", lambda r: r.deaths), ("doses", lambda r: r.doses)):
        rows = [["p_star\\r_star", *[_g(r) for r in r_values]]]
        rows += [[_g(p), *[_g(get(c)) for c in row]] for p, row in zip(p_values, grid_)]
        paths.append(_write(Path(out) / f"table2_{name}.csv", rows))
    return paths[0], paths[1]


def write_table3(results: dict[str, RunSummary], out: Path) -> Path:
    names = list(results)
    return _write(
        Path(out) / "table3.csv",
        [
            ["Strategy", *names],
            ["Deaths", *[_g(results[n].deaths) for n in names]],
            ["1 Doses", *[_g(results[n].doses_per_vaccine[0]) for n in names]],
            ["2 Doses", *[_g(results[n].doses_per_vaccine[1]) for n in names]],
            ["Doses Tot.", *[_g(results[n].doses) for n in names]],
        ],
    )


def write_table4(results: dict[str, RunSummary], out: Path) -> Path:
    names = list(results)
    return _write(
        Path(out) / "table4.csv",
        [
            ["Strategy", *names],
            ["Deaths 1", *[_g(results[n].deaths_by_class[0]) for n in names]],
            ["Deaths 2", *[_g(results[n].deaths_by_class[1]) for n in names]],
            ["Deaths Tot.", *[_g(results[n].deaths) for n in names]],
            ["Doses 1", *[_g(results[n].doses_by_class[0].sum()) for n in names]],
            ["Doses 2", *[_g(results[n].doses_by_class[1].sum()) for n in names]],
            ["Doses Tot.", *[_g(results[n].doses) for n in names]],
        ],
    )
