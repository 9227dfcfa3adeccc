"""Write the time series behind the figures as CSV (plotting is left to the reader).

    python3 scripts/figure_series.py --out out/figures
"""
import argparse
from pathlib import Path

from multivax import Mesh, R0Feedback, Threshold, Zero, make_preset, run, write_series
from multivax.strategies import AgeClassFirst, AgeFeedback, AgeHalfHalf

RUNS = {
    "reference": ("single_vaccine", Zero()),
    "threshold_10": ("single_vaccine", Threshold(10.0)),
    "threshold_25": ("single_vaccine", Threshold(25.0)),
    "feedback_p0.5_r0.25": ("single_vaccine", R0Feedback(0.5, 0.25)),
    "feedback_p3.5_r1": ("single_vaccine", R0Feedback(3.5, 1.0)),
    "feedback_p0.1_r1": ("single_vaccine", R0Feedback(0.1, 1.0)),
    "feedback_p4_r1": ("single_vaccine", R0Feedback(4.0, 1.0)),
    "infinite_TV_threshold_10": ("infinite_TV", Threshold(10.0)),
    "infinite_TR_threshold_10": ("infinite_TR", Threshold(10.0)),
    "two_classes_reference": ("two_classes", Zero()),
    "two_classes_feedback": ("two_classes", AgeFeedback()),
    "two_classes_half_half": ("two_classes", AgeHalfHalf()),
    "two_classes_class2_first": ("two_classes", AgeClassFirst(1)),
    "two_classes_class1_first": ("two_classes", AgeClassFirst(0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--dt", type=float, default=0.05)
    args = ap.parse_args()
    for label, (preset, strategy) in RUNS.items():
        spec, init = make_preset(preset, dt=args.dt)
        ts = run(spec, init, strategy, Mesh(dt=args.dt), label=label)
        path = write_series(ts, Path(args.out) / f"{label}.csv")
        print(f"{label:<28} deaths {ts.total_deaths:7.3f}  -> {path}")


if __name__ == "__main__":
    main()
