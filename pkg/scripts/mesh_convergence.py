"""Deaths of the reference run as dt is halved, and the manufactured-solution order.

    python3 scripts/mesh_convergence.py
"""
import argparse

from multivax import Mesh, Zero, make_preset, run
from multivax.oracle import uuu_convergence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    args = ap.parse_args()
    prev = None
    print("dt        deaths      change")
    for dt in args.dts:
        spec, init = make_preset("single_vaccine", dt=dt)
        d = run(spec, init, Zero(), Mesh(dt=dt)).total_deaths
        change = "" if prev is None else f"{(d - prev) / prev:+.3%}"
        print(f"{dt:<8g} {d:10.5f}  {change}")
        prev = d
    study = uuu_convergence(tuple(args.dts[:3]))
    print("\nmanufactured line: " + ", ".join(f"dt={dt:g} err={e:.2e}" for dt, e in zip(study.dts, study.errors)))
    print(f"observed order {study.order:.3f}")


if __name__ == "__main__":
    main()
