"""Scenario files, CSV time series and run manifests.

A scenario is a small sectioned key/value file::

    [model]
    preset = single_vaccine
    T_V = 180

    [initial]
    S = 95
    I = 5

    [mesh]
    dt = 0.05
    horizon_T = 730
    stride = 1

    [strategy]
    kind = threshold
    S_star = 10

    [output]
    dir = reference
    series = true

``[model]`` names a preset and may override any of its builder's physics
keywords.  Lists are comma separated, matrix rows are separated by ``;``.
Vaccine and class indices are 1-based in files.  Unknown sections or keys
are rejected.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import inspect
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import models
from .integrator import TimeSeries
from .models import ModelSpec
from .state import Mesh, SystemState
from .strategies import (
    STRATEGY_KINDS,
    AgeClassFirst,
    StrategySpec,
    VaccineSchedule,
    Zero,
)

SECTIONS = ("model", "initial", "mesh", "strategy", "output")
OUTPUT_ROOT_ENV = "MULTIVAX_OUTPUT_ROOT"


class ScenarioError(ValueError):
    """Bad scenario text; ``key`` is the offending ``section.key`` when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "out"))


_BUILDERS = {
    "sir4": models.sir_model,
    "sir5": models.single_vaccine_model,
    "single_vaccine": models.single_vaccine_model,
    "infinite_TV": models.single_vaccine_model,
    "infinite_TR": models.single_vaccine_model,
    "two_vaccines": models.two_vaccines_model,
    "two_classes": models.two_classes_model,
}
# builder keywords that select the preset rather than set physics
_STRUCTURAL = {"vaccine", "infinite_TV", "infinite_TR", "name"}


def model_keys(preset: str) -> dict[str, Any]:
    """Overridable physics keywords of a preset and their default values."""
    if preset not in _BUILDERS:
        raise ScenarioError(f"unknown preset {preset!r}", "model.preset")
    sig = inspect.signature(_BUILDERS[preset])
    keys = {n: p.default for n, p in sig.parameters.items() if n not in _STRUCTURAL}
    if preset == "sir5":
        keys = {n: v for n, v in keys.items() if n not in ("T_V", "rho_V_floor")}
    return keys


@dataclass(frozen=True)
class Scenario:
    preset: str
    model: tuple[tuple[str, Any], ...] = ()
    S0: tuple[float, ...] = ()
    I0: tuple[float, ...] = ()
    mesh: Mesh = Mesh()
    strategy: StrategySpec = Zero()
    output_dir: str = ""
    series: bool = True
    name: str = ""

    def build(self) -> tuple[ModelSpec, SystemState, StrategySpec]:
        spec = models.preset_model(self.preset, **dict(self.model))
        try:
            state = spec.initial_state(self.S0, self.I0, self.mesh.dt)
        except ValueError as exc:
            raise ScenarioError(str(exc), "initial") from exc
        return spec, state, self.strategy

    def with_value(self, path: str, value: Any) -> "Scenario":
        """Copy with ``section.key`` set to ``value`` (validated like file input)."""
        section, _, key = path.partition(".")
        sections = to_sections(self)
        if section not in SECTIONS or not key:
            raise ScenarioError("expected section.key", path)
        sections[section][key] = _fmt(value)
        return from_sections(sections, self.name)


# --- parsing ---------------------------------------------------------------


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list, np.ndarray)):
        if len(v) and isinstance(v[0], (tuple, list, np.ndarray)):
            return "; ".join(_fmt(row) for row in v)
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def _float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ScenarioError(f"not a number: {text!r}", key) from None


def _floats(text: str, key: str) -> tuple[float, ...]:
    return tuple(_float(x.strip(), key) for x in text.split(",") if x.strip())


def _bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ScenarioError(f"not a boolean: {text!r}", key)


def _parse_like(default: Any, text: str, key: str) -> Any:
    if isinstance(default, bool):
        return _bool(text, key)
    if isinstance(default, str):
        return text.strip()
    if isinstance(default, (tuple, list)):
        if default and isinstance(default[0], (tuple, list)):
            rows = tuple(_floats(r, key) for r in text.split(";"))
            if len({len(r) for r in rows}) != 1:
                raise ScenarioError("ragged matrix", key)
            return rows
        return _floats(text, key)
    return _float(text, key)


def _strategy_from(sec: dict[str, str]) -> StrategySpec:
    kind = sec.pop("kind", None)
    if kind is None:
        raise ScenarioError("missing", "strategy.kind")
    cls = STRATEGY_KINDS.get(kind.strip())
    if cls is None:
        raise ScenarioError(f"unknown kind {kind!r}; choose from {', '.join(STRATEGY_KINDS)}", "strategy.kind")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs: dict[str, Any] = {}
    for key, text in sec.items():
        path = f"strategy.{key}"
        if key not in fields:
            raise ScenarioError(f"not a parameter of {kind}", path)
        if cls is VaccineSchedule and key == "windows":
            windows = []
            for item in text.split(","):
                parts = item.strip().split(":")
                if len(parts) != 3:
                    raise ScenarioError("windows are vaccine:t_from:t_to", path)
                idx = int(_float(parts[0], path))
                if idx < 1:
                    raise ScenarioError("vaccine numbers start at 1", path)
                windows.append((idx - 1, _float(parts[1], path), _float(parts[2], path)))
            kwargs[key] = tuple(windows)
        elif cls is AgeClassFirst and key == "first_class":
            idx = int(_float(text, path))
            if idx < 1:
                raise ScenarioError("class numbers start at 1", path)
            kwargs[key] = idx - 1
        else:
            kwargs[key] = _float(text, path)
    missing = [
        n
        for n, f in fields.items()
        if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING and n not in kwargs
    ]
    if missing:
        raise ScenarioError("missing", f"strategy.{missing[0]}")
    strategy = cls(**kwargs)
    for n in ("rate", "p_star", "S_star"):
        if getattr(strategy, n, 0.0) < 0:
            raise ScenarioError("must be nonnegative", f"strategy.{n}")
    return strategy


def from_sections(sections: dict[str, dict[str, str]], name: str = "") -> Scenario:
    for sec in sections:
        if sec not in SECTIONS:
            raise ScenarioError(f"unknown section [{sec}]")
    model = dict(sections.get("model", {}))
    preset = model.pop("preset", None)
    if preset is None:
        raise ScenarioError("missing", "model.preset")
    preset = preset.strip()
    allowed = model_keys(preset)
    overrides = []
    for key, text in model.items():
        if key not in allowed:
            raise ScenarioError(f"not a parameter of preset {preset}", f"model.{key}")
        overrides.append((key, _parse_like(allowed[key], text, f"model.{key}")))
    overrides.sort()
    try:
        spec = models.preset_model(preset, **dict(overrides))
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc), "model") from exc

    init = dict(sections.get("initial", {}))
    S_default, I_default = models.preset_initial(preset)
    S0 = _floats(init.pop("S"), "initial.S") if "S" in init else S_default
    I0 = _floats(init.pop("I"), "initial.I") if "I" in init else I_default
    if init:
        raise ScenarioError("unknown key", f"initial.{next(iter(init))}")
    for label, vals in (("S", S0), ("I", I0)):
        if len(vals) != spec.m:
            raise ScenarioError(f"need {spec.m} values", f"initial.{label}")
        if any(v < 0 for v in vals):
            raise ScenarioError("populations must be nonnegative", f"initial.{label}")

    mesh_sec = dict(sections.get("mesh", {}))
    mesh_kw = {}
    for key in ("dt", "horizon_T", "stride"):
        if key in mesh_sec:
            mesh_kw[key] = _float(mesh_sec.pop(key), f"mesh.{key}")
    if mesh_sec:
        raise ScenarioError("unknown key", f"mesh.{next(iter(mesh_sec))}")
    try:
        mesh = Mesh(**mesh_kw)
    except ValueError as exc:
        raise ScenarioError(str(exc), "mesh") from exc
    profiles = [p for per_class in spec.vaccine_profiles for row in per_class for p in row]
    profiles += [p for row in spec.recovered_profiles for p in row]
    try:
        for p in profiles:
            mesh.check_line_horizon(p.horizon)
    except ValueError as exc:
        raise ScenarioError(str(exc), "mesh.dt") from exc

    strategy = _strategy_from(dict(sections.get("strategy", {"kind": "zero"})))
    if spec.k == 0 and not isinstance(strategy, Zero):
        raise ScenarioError(f"preset {preset} has no vaccine", "strategy.kind")
    if isinstance(strategy, VaccineSchedule):
        for i, t0, t1 in strategy.windows:
            if i >= spec.k:
                raise ScenarioError(f"vaccine {i + 1} does not exist", "strategy.windows")
            if not 0 <= t0 <= t1 <= mesh.horizon_T:
                raise ScenarioError("window outside [0, horizon_T]", "strategy.windows")
    if isinstance(strategy, AgeClassFirst) and strategy.first_class >= spec.m:
        raise ScenarioError(f"class {strategy.first_class + 1} does not exist", "strategy.first_class")

    out = dict(sections.get("output", {}))
    output_dir = out.pop("dir", "").strip()
    series = _bool(out.pop("series"), "output.series") if "series" in out else True
    if out:
        raise ScenarioError("unknown key", f"output.{next(iter(out))}")
    return Scenario(preset, tuple(overrides), tuple(S0), tuple(I0), mesh, strategy, output_dir, series, name)


def parse_scenario(text: str, name: str = "") -> Scenario:
    if not text.strip():
        raise ScenarioError("empty scenario")
    cp = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False)
    cp.optionxform = str  # keys are case sensitive (S_star, T_V)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"syntax error: {exc}") from None
    sections = {s: dict(cp[s]) for s in cp.sections()}
    return from_sections(sections, name)


def load_scenario(path: str | os.PathLike) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem)


def to_sections(s: Scenario) -> dict[str, dict[str, str]]:
    strat: dict[str, str] = {"kind": s.strategy.kind}
    for f in dataclasses.fields(s.strategy):
        v = getattr(s.strategy, f.name)
        if isinstance(s.strategy, VaccineSchedule) and f.name == "windows":
            strat[f.name] = ", ".join(f"{i + 1}:{_fmt(a)}:{_fmt(b)}" for i, a, b in v)
        elif isinstance(s.strategy, AgeClassFirst) and f.name == "first_class":
            strat[f.name] = str(v + 1)
        else:
            strat[f.name] = _fmt(v)
    out = {"series": _fmt(s.series)}
    if s.output_dir:
        out["dir"] = s.output_dir
    return {
        "model": {"preset": s.preset, **{k: _fmt(v) for k, v in s.model}},
        "initial": {"S": _fmt(s.S0), "I": _fmt(s.I0)},
        "mesh": {"dt": _fmt(s.mesh.dt), "horizon_T": _fmt(s.mesh.horizon_T), "stride": _fmt(s.mesh.stride)},
        "strategy": strat,
        "output": out,
    }


def render_scenario(s: Scenario) -> str:
    lines = []
    for sec, kv in to_sections(s).items():
        lines.append(f"[{sec}]")
        lines.extend(f"{k} = {v}" for k, v in kv.items())
        lines.append("")
    return "\n".join(lines)


# --- CSV output --------------------------------------------------------------


def _g(x: float) -> str:
    return format(float(x), ".9g")


def series_header(k: int) -> list[str]:
    return (
        ["t", "class", "S", "I"]
        + [f"V_total_{i + 1}" for i in range(k)]
        + ["R_total", "R0", "cum_deaths"]
        + [f"cum_doses_{i + 1}" for i in range(k)]
    )


def write_series(series: TimeSeries, path: str | os.PathLike, manifest: bool = True) -> Path:
    """Write one row per class per sample and append a summary row to ``manifest.csv``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            fh.write(f"# m={series.m} k={series.k} label={series.label}\n")
            w = csv.writer(fh)
            w.writerow(series_header(series.k))
            for j in range(series.n):
                for a in range(series.m):
                    w.writerow(
                        [_g(series.t[j]), a + 1, _g(series.S[j, a]), _g(series.I[j, a])]
                        + [_g(v) for v in series.V[j, a]]
                        + [_g(series.R[j, a]), _g(series.r0[j]), _g(series.cum_deaths[j, a])]
                        + [_g(v) for v in series.cum_doses[j, a]]
                    )
        if manifest and series.n:
            append_manifest(path.parent / "manifest.csv", series.label or path.stem, series)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


MANIFEST_HEADER = ["run", "deaths_total", "doses_total_per_vaccine", "final_time"]


def append_manifest(path: str | os.PathLike, run: str, series: TimeSeries) -> None:
    path = Path(path)
    new = not path.exists()
    with path.open("a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(MANIFEST_HEADER)
        w.writerow(
            [run, _g(series.total_deaths), ";".join(_g(v) for v in series.total_doses), _g(series.t[-1])]
        )


def read_series(path: str | os.PathLike) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parse a CSV written by :func:`write_series` into (header info, rows)."""
    with Path(path).open() as fh:
        first = fh.readline().lstrip("#").split()
        info = dict(item.split("=", 1) for item in first)
        rows = list(csv.DictReader(fh))
    return info, rows
