"""Epidemic models whose vaccinated and recovered compartments carry an age
since vaccination/recovery, with pluggable vaccination strategies."""
from .integrator import NumericalFailure, TimeSeries, run, step
from .models import PRESETS, ModelSpec, make_preset, preset_model
from .observables import deaths, doses, r0
from .scenario_io import Scenario, ScenarioError, load_scenario, parse_scenario, render_scenario, write_series
from .state import Mesh, SystemState
from .strategies import (
    AgeClassFirst,
    AgeFeedback,
    AgeHalfHalf,
    R0Feedback,
    SplitSchedule,
    Threshold,
    VaccineSchedule,
    Zero,
)

__all__ = [
    "PRESETS",
    "AgeClassFirst",
    "AgeFeedback",
    "AgeHalfHalf",
    "Mesh",
    "ModelSpec",
    "NumericalFailure",
    "R0Feedback",
    "Scenario",
    "ScenarioError",
    "SplitSchedule",
    "SystemState",
    "Threshold",
    "TimeSeries",
    "VaccineSchedule",
    "Zero",
    "deaths",
    "doses",
    "load_scenario",
    "make_preset",
    "parse_scenario",
    "preset_model",
    "r0",
    "render_scenario",
    "run",
    "step",
    "write_series",
]
