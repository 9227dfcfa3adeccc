"""Command line entry point: ``multivax simulate|sweep|validate|presets|tables``.

Outputs go under ``$MULTIVAX_OUTPUT_ROOT`` (default ``./out``).  Exit codes:
0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import models
from .integrator import NumericalFailure
from .scenario_io import ScenarioError, load_scenario, output_root, write_series
from .sweeps import (
    FEEDBACK_P,
    FEEDBACK_R,
    THRESHOLDS,
    grid,
    run_many,
    run_scenario,
    run_strategy_suite,
    summarize,
    sweep_feedback,
    sweep_threshold,
    write_table1,
    write_table2,
    write_table3,
    write_table4,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

PRESET_NOTES = {
    "sir4": "SIR with permanent immunity, no vaccine",
    "sir5": "SIR with waning immunity, no vaccine",
    "single_vaccine": "one class, one waning vaccine (reference model)",
    "infinite_TV": "single_vaccine with vaccine protection that never expires",
    "infinite_TR": "single_vaccine with recovered protection that never expires",
    "two_vaccines": "one class, two vaccines with plateau protection",
    "two_classes": "two age classes, one vaccine",
}


def _out_dir(args, scenario_dir: str = "") -> Path:
    base = Path(args.out) if args.out else output_root()
    return base / scenario_dir if scenario_dir else base


def cmd_simulate(args) -> int:
    scn = load_scenario(args.scenario)
    series = run_scenario(scn)
    out = _out_dir(args, scn.output_dir or scn.name)
    if scn.series:
        path = write_series(series, out / f"{scn.name or 'run'}.csv")
        print(f"wrote {path}")
    s = summarize(series)
    doses = ", ".join(f"{d:.4g}" for d in s.doses_per_vaccine) or "-"
    print(f"deaths {s.deaths:.4g}  doses per vaccine [{doses}]  final time {s.final_time:g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = load_scenario(args.scenario)
    if not args.vary:
        raise ScenarioError("give at least one --vary section.key=a:b:step")
    try:
        points = grid(base, args.vary)
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc), "--vary") from exc
    labels = [",".join(f"{k}={v:g}" for k, v in p.items()) for p, _ in points]
    results = run_many([(scn, lab) for (_, scn), lab in zip(points, labels)], args.workers)
    out = _out_dir(args, base.output_dir or base.name)
    out.mkdir(parents=True, exist_ok=True)
    keys = list(points[0][0]) if points else []
    k = len(results[0].doses_per_vaccine) if results else 0
    path = out / "sweep.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys + ["deaths_total"] + [f"doses_total_{i + 1}" for i in range(k)])
        for (point, _), r in zip(points, results):
            w.writerow(
                [format(point[key], ".9g") for key in keys]
                + [format(r.deaths, ".9g")]
                + [format(d, ".9g") for d in r.doses_per_vaccine]
            )
    print(f"wrote {path} ({len(results)} runs)")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .oracle import pinned_regime_check
    from .oracle import uuu_convergence

    study = uuu_convergence(dts=(args.dt, args.dt / 2, args.dt / 4))
    print("manufactured line vs closed form (L-inf error):")
    for dt, err in zip(study.dts, study.errors):
        print(f"  dt={dt:<8g} error={err:.3e}")
    print(f"  observed order {study.order:.3f}")
    for r_star in (1.0, 0.95):
        chk = pinned_regime_check(r_star=r_star)
        print(
            f"pinned r0={r_star:g} on [{chk.t_star:g}, {chk.T:g}]: "
            f"I rel err {chk.I_rel_err:.3%}, deaths {chk.deaths_sim:.4g} vs {chk.deaths_closed:.4g} "
            f"({chk.deaths_rel_err:.3%})"
        )
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in models.PRESETS:
        spec = models.preset_model(name)
        print(f"{name:<15} m={spec.m} k={spec.k}  {PRESET_NOTES.get(name, '')}")
    return EXIT_OK


def cmd_tables(args) -> int:
    out = _out_dir(args, "tables")
    which = set(args.which)
    if "1" in which:
        res = sweep_threshold(THRESHOLDS + (100.0,), workers=args.workers)
        print(f"wrote {write_table1(res, THRESHOLDS + (100.0,), out)}")
    if "2" in which:
        g = sweep_feedback(FEEDBACK_P, FEEDBACK_R, workers=args.workers)
        for p in write_table2(g, FEEDBACK_P, FEEDBACK_R, out):
            print(f"wrote {p}")
    if "3" in which:
        print(f"wrote {write_table3(run_strategy_suite('two_vaccines', workers=args.workers), out)}")
    if "4" in which:
        print(f"wrote {write_table4(run_strategy_suite('two_classes', workers=args.workers), out)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multivax", description="Vaccination-epidemic simulations.")
    ap.add_argument("--out", help="output root (overrides $MULTIVAX_OUTPUT_ROOT)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    p.add_argument("scenario")
    p.add_argument("--vary", action="append", default=[], metavar="SECTION.KEY=A:B:STEP")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="compare the integrator with closed-form solutions")
    p.add_argument("--dt", type=float, default=0.2, help="coarsest mesh of the convergence study")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list built-in models")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("tables", help="regenerate the result tables as CSV")
    p.add_argument("--which", nargs="+", default=["1", "2", "3", "4"], choices=["1", "2", "3", "4"])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_tables)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
