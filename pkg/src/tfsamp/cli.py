"""Command-line entry point ``tfsamp``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from tfsamp.bounds import (
    CalibrationConstants,
    compact_frame_bounds,
    planar_sampling_bound,
    planar_sampling_bound_closed,
    sunzhou_check,
    thm_main_bound,
)
from tfsamp.errors import CapabilityError, DomainError
from tfsamp.geometry import DensityQuery, density_gamma, parse_region
from tfsamp.specfun import WindowSpec, nu


def _log_entry(ln_value: float) -> dict:
    """ln, log10 and the linear value when it is representable."""
    linear = math.exp(ln_value) if ln_value < 709 else None
    return {"ln": ln_value, "log10": ln_value / math.log(10), "linear": linear}


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DomainError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def _dump(obj) -> None:
    from tfsamp.bounds import _jsonable

    print(json.dumps(_jsonable(obj), indent=1))


def cmd_constants(args) -> int:
    if args.nu is not None:
        n, R = int(args.nu[0]), float(args.nu[1])
        print(f"{nu(n, R):.12g}")
        return 0
    if args.theorem is None:
        raise DomainError("give --nu n R or --theorem")
    prm = _parse_params(args.params)
    R = float(prm.get("R", 1.0))
    if args.theorem == "main":
        n, gamma, p = int(prm.get("n", 0)), float(prm.get("gamma", 1.0)), float(prm.get("p", 2.0))
        cal = CalibrationConstants(float(prm.get("C", 1.0)))
        mb = thm_main_bound(n, R, gamma, p, cal)
        _dump({"theorem": "main", "n": n, "R": R, "gamma": gamma, "p": p, "C": cal.C_numerical,
               "nu": nu(n, R), "sigma": mb.sigma, "eta": _log_entry(mb.eta_log),
               "bound": _log_entry(mb.bound_log)})
        return 0
    g = WindowSpec.from_string(prm.get("window", "hat:1"))
    nm = g.norms
    norms = {"l2": nm.l2, "deriv_l2": nm.deriv_l2, "t_weighted_l2": nm.t_weighted_l2,
             "t_weighted_deriv_l2": nm.t_weighted_deriv_l2}
    if args.theorem == "sunzhou":
        sz = sunzhou_check(g, R)
        _dump({"theorem": "sunzhou", "window": g.to_dict(), "R": R, "norms": norms,
               "Delta": sz.Delta, "condition_met": sz.condition_met, "A_lower": sz.A_lower,
               "B_upper": sz.B_upper})
    elif args.theorem == "compact":
        fb = compact_frame_bounds(g, R)
        _dump({"theorem": "compact", "window": g.to_dict(), "R": R, "norms": norms, "R_g": fb.R_g,
               "admissible": fb.admissible, "A": fb.A, "B": fb.B})
    else:
        gamma = float(prm.get("gamma", 1.0))
        fb = compact_frame_bounds(g, R)
        C = planar_sampling_bound(g, R, gamma)
        _dump({"theorem": "planar", "window": g.to_dict(), "R": R, "gamma": gamma, "norms": norms,
               "R_g": fb.R_g, "A": fb.A, "B": fb.B, "C": C,
               "C_closed": planar_sampling_bound_closed(g, R, gamma)})
    return 0


def cmd_stft(args) -> int:
    from tfsamp.tfcore import Signal, stft_grid

    f = Signal.from_dict(json.loads(Path(args.signal).read_text()))
    grid = stft_grid(f, WindowSpec.from_string(args.window), args.trunc, args.step)
    grid.to_csv(args.out)
    print(f"wrote {grid.values.size} nodes to {args.out}")
    return 0


def cmd_remez(args) -> int:
    from tfsamp.polyfock import PolyFunction, remez_ratio

    F = PolyFunction.from_dict(json.loads(Path(args.poly).read_text()))
    cal = CalibrationConstants(kappa=args.kappa, c_brudnyi=args.c)
    res = remez_ratio(F, parse_region(args.region), args.rho, args.R, cal)
    _dump(res.to_dict())
    return 0 if res.verdict != "fail" else 1


def cmd_density(args) -> int:
    res = density_gamma(parse_region(args.region),
                        DensityQuery(args.R, args.mode, search_halfwidth=args.search))
    _dump(res.to_dict())
    return 0


def _exit_for(verdicts) -> int:
    return 0 if all(v != "fail" for v in verdicts) else 1


def cmd_sampling_ratio(args) -> int:
    from tfsamp.harness import ExperimentConfig, run_sampling_experiment, write_reports

    cfg = ExperimentConfig.from_json(args.config)
    reports = run_sampling_experiment(cfg)
    out = args.out or cfg.output
    if out:
        jpath, cpath = write_reports(reports, out, cfg.name)
        print(f"wrote {jpath} and {cpath}", file=sys.stderr)
    for r in reports:
        print(f"{cfg.name}[{r.inputs['signal_index']}] ratio={r.inputs['ratio']:.6g} "
              f"compared_ln={r.empirical_value:.6g} bound_ln={r.theoretical_value} {r.verdict}")
    return _exit_for(r.verdict for r in reports)


def cmd_frame_bounds(args) -> int:
    from tfsamp.harness import FrameExperiment, empirical_frame_bounds

    data = json.loads(Path(args.config).read_text())
    seeds = data.pop("seeds", None)
    runs = [dict(data, seed=s) for s in seeds] if seeds else [data]
    results = []
    for d in runs:
        res = empirical_frame_bounds(FrameExperiment.from_dict(d))
        results.append({"config": d, **res.to_dict()})
    _dump(results)
    return _exit_for(v for r in results for v in (r["A_verdict"], r["B_verdict"]))


def cmd_calibrate(args) -> int:
    from tfsamp.harness import calibrate_constants, load_reports

    cal = calibrate_constants(load_reports(args.reports), tol=args.tol)
    _dump({"C_hat": cal.C_numerical, "note": "empirical lower bound on any valid constant"})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tfsamp", description="Sampling bounds for the STFT")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="special values and theorem constants")
    p.add_argument("--nu", nargs=2, metavar=("n", "R"))
    p.add_argument("--theorem", choices=["main", "sunzhou", "compact", "planar"])
    p.add_argument("--params", nargs="*", metavar="key=value",
                   help="n, R, gamma, p, C, window (hermite:n or hat:S)")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("stft", help="STFT of a signal on a phase-space grid")
    p.add_argument("--signal", required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--trunc", type=float, default=6.0)
    p.add_argument("--step", type=float, default=1 / 32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stft)

    p = sub.add_parser("remez", help="Remez-type ratio for a polyanalytic polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=cmd_remez)

    p = sub.add_parser("density", help="relative density of a region")
    p.add_argument("--region", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--mode", choices=["square", "disc"], default="square")
    p.add_argument("--search", type=float, default=None,
                   help="half-width of the scan window for aperiodic regions")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sampling-ratio", help="run a sampling-ratio experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="report directory (overrides the config)")
    p.set_defaults(func=cmd_sampling_ratio)

    p = sub.add_parser("frame-bounds", help="empirical frame bounds on a Hermite subspace")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_frame_bounds)

    p = sub.add_parser("calibrate", help="estimate the numerical constant from reports")
    p.add_argument("--reports", required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_calibrate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
