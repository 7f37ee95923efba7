"""Calibrate the numerical constant on one Hermite-window sweep and test it on another.

    python3 scripts/run_calibration.py --train-seed 0 --heldout-seed 1000 --out results/calibration
"""

import argparse
import json
import math
from pathlib import Path

from tfsamp.bounds import CalibrationConstants, thm_main_bound
from tfsamp.harness import calibrate_constants, hermite_sweep_configs, run_sampling_experiment, write_reports


def run_sweep(seed, n_experiments):
    return [r for c in hermite_sweep_configs(seed, n_experiments) for r in run_sampling_experiment(c)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--train-seed", type=int, default=0)
    ap.add_argument("--heldout-seed", type=int, default=1000)
    ap.add_argument("--experiments", type=int, default=50)
    ap.add_argument("--factor", type=float, default=2.0, help="safety factor applied to C_hat")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)
    if abs(args.train_seed - args.heldout_seed) < args.experiments:
        ap.error("seed ranges overlap; the held-out set would not be disjoint")

    train = run_sweep(args.train_seed, args.experiments)
    held = run_sweep(args.heldout_seed, args.experiments)
    C_hat = calibrate_constants(train).C_numerical
    cal = CalibrationConstants(args.factor * C_hat)
    worst = max(math.log(r.inputs["ratio"])
                - thm_main_bound(r.inputs["n"], r.inputs["R"], r.inputs["gamma"], 2, cal).bound_log
                for r in held)
    summary = {"C_hat": C_hat, "C_used": cal.C_numerical, "train_reports": len(train),
               "heldout_reports": len(held), "worst_heldout_log_margin": worst,
               "heldout_ok": worst <= 0}
    if args.out:
        write_reports(train, args.out, "train")
        write_reports(held, args.out, "heldout")
        Path(args.out, "summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))
    return 0 if summary["heldout_ok"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
