"""Regenerate table1.csv ... table4.csv and print a summary of each.

    python3 scripts/reproduce_tables.py --out out/tables --workers 2
"""
import argparse
from pathlib import Path

from multivax.sweeps import (
    FEEDBACK_P,
    FEEDBACK_R,
    THRESHOLDS,
    base_scenario,
    run_strategy_suite,
    sweep_feedback,
    sweep_threshold,
    write_table1,
    write_table2,
    write_table3,
    write_table4,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/tables")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--dt", type=float, default=0.05)
    args = ap.parse_args()
    out = Path(args.out)
    base = base_scenario("single_vaccine", dt=args.dt)

    s_values = THRESHOLDS + (100.0,)
    t1 = sweep_threshold(s_values, base, workers=args.workers)
    write_table1(t1, s_values, out)
    print("S_star  deaths   doses")
    for s, r in zip(s_values, t1):
        print(f"{s:6g} {r.deaths:7.3f} {r.doses:7.2f}")

    grid = sweep_feedback(FEEDBACK_P, FEEDBACK_R, base, workers=args.workers)
    write_table2(grid, FEEDBACK_P, FEEDBACK_R, out)
    print("\np_star  deaths (r*=0.25, 0.5, 1)   doses (r*=0.25, 0.5, 1)")
    for p, row in zip(FEEDBACK_P, grid):
        d = " ".join(f"{c.deaths:6.3f}" for c in row)
        v = " ".join(f"{c.doses:6.1f}" for c in row)
        print(f"{p:6g}  {d}   {v}")

    for family, writer in (("two_vaccines", write_table3), ("two_classes", write_table4)):
        res = run_strategy_suite(family, dt=args.dt, workers=args.workers)
        writer(res, out)
        print(f"\n{family}")
        for name, r in res.items():
            per = " / ".join(f"{d:.3f}" for d in r.deaths_by_class)
            doses = " / ".join(f"{d:.1f}" for d in r.doses_per_vaccine)
            print(f"  {name:<14} deaths {r.deaths:6.3f} ({per})  doses {doses}")
    print(f"\nCSV written to {out}")


if __name__ == "__main__":
    main()
