"""Experiment orchestration: sampling ratios, empirical frame bounds, calibration, reports.

Every report embeds the configuration that produced it, and all randomness
flows from the seeds stored there, so replaying a report's configuration
reproduces its numbers exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy.linalg

from tfsamp.bounds import (
    BoundReport,
    CalibrationConstants,
    compact_frame_bounds,
    planar_sampling_bound,
    sunzhou_check,
    thm_main_bound,
)
from tfsamp.errors import CapabilityError, DomainError
from tfsamp.geometry import DensityQuery, density_gamma, jittered_lattice, parse_region
from tfsamp.specfun import WindowSpec
from tfsamp.tfcore import (
    DEFAULT_DT,
    Signal,
    expansion_grid,
    lp_norm,
    random_expansion,
    stft_grid,
    stft_points,
)

HERMITE_REPORT = "hermite_sampling_ratio"
COMPACT_REPORT = "compact_sampling_ratio"


@dataclass
class ExperimentConfig:
    window: dict
    region: str
    R: float
    signals: dict = field(default_factory=lambda: {"family": "random_hermite", "K": 8,
                                                   "count": 20, "seed": 42})
    p: float = 2.0
    trunc: float = 6.0
    step: float = 1.0 / 32
    dt: float = DEFAULT_DT
    calibration: dict = field(default_factory=lambda: CalibrationConstants().to_dict())
    tolerance: float = 0.05
    density_mode: str | None = None  # default: disc for Hermite windows, square otherwise
    search_halfwidth: float | None = None
    gamma: float | None = None  # declared density; replaces the scanned one when given
    name: str = "experiment"
    output: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def make_signals(spec: dict) -> list[Signal]:
    if spec.get("family") == "random_hermite":
        rng = np.random.default_rng(spec["seed"])
        return [random_expansion(spec["K"], rng) for _ in range(spec["count"])]
    if "file" in spec:
        data = json.loads(Path(spec["file"]).read_text())
        items = data if isinstance(data, list) else [data]
        return [Signal.from_dict(d) for d in items]
    if "signals" in spec:
        return [Signal.from_dict(d) for d in spec["signals"]]
    raise DomainError(f"cannot build signals from {spec!r}")


def _grid_for(f: Signal, g: WindowSpec, cfg: ExperimentConfig):
    if f.kind == "hermite":
        return expansion_grid(f, g, cfg.trunc, cfg.step, cfg.dt)
    return stft_grid(f, g, cfg.trunc, cfg.step, cfg.dt)


def run_sampling_experiment(cfg: ExperimentConfig) -> list[BoundReport]:
    """Measure ||V_g f||_{L^p(C)} / ||V_g f||_{L^p(Omega)} for each signal and compare with theory.

    Hermite windows are compared with the Hermite-window bound eta (gamma/C)^{-sigma}
    (disc density, ``cfg.calibration``).  Compact windows with p = 2 are
    compared with the planar sampling constant, which bounds the ratio of
    squared norms, so the squared ratio is what gets compared there.
    """
    g = WindowSpec.from_dict(cfg.window)
    region = parse_region(cfg.region)
    cal = CalibrationConstants(**cfg.calibration)
    mode = cfg.density_mode or ("square" if g.compact else "disc")
    search = cfg.search_halfwidth if cfg.search_halfwidth is not None else cfg.trunc
    dens = density_gamma(region, DensityQuery(cfg.R, mode, search_halfwidth=search))
    gamma = min(1.0, dens.gamma_conservative) if cfg.gamma is None else cfg.gamma

    theory: dict = {"gamma_scan": dens.gamma, "gamma_used": gamma,
                    "gamma_declared": cfg.gamma is not None}
    if g.kind == "hermite":
        name, power = HERMITE_REPORT, 1
        if gamma > 0:
            mb = thm_main_bound(g.n, cfg.R, gamma, cfg.p, cal)
            theory.update(sigma=mb.sigma, eta_log=mb.eta_log, bound_log=mb.bound_log)
            log_bound = mb.bound_log
        else:
            log_bound = None
    else:
        name, power = COMPACT_REPORT, 2
        log_bound = None
        fb = compact_frame_bounds(g, cfg.R)
        theory.update(R_g=fb.R_g, A=fb.A, B=fb.B, admissible=fb.admissible)
        if cfg.p == 2 and fb.admissible and gamma > 0:
            C = planar_sampling_bound(g, cfg.R, gamma)
            theory["planar_constant"] = C
            log_bound = math.log(C)

    mask_all = None
    reports = []
    for idx, f in enumerate(make_signals(cfg.signals)):
        grid = _grid_for(f, g, cfg)
        total = lp_norm(grid, cfg.p, mask_all)
        part = lp_norm(grid, cfg.p, region)
        note = ""
        if part == 0:
            ratio = math.inf
            note = "Omega carries no mass inside the truncation square"
        else:
            ratio = total / part
        log_emp = power * math.log(ratio) if math.isfinite(ratio) else math.inf
        inputs = {"signal_index": idx, "n": g.n if g.kind == "hermite" else None, "R": cfg.R,
                  "p": cfg.p, "gamma": gamma, "ratio": ratio, "compared_power": power,
                  "config": cfg.to_dict()}
        if log_bound is None:
            rep = BoundReport(name, None, log_emp, inputs=inputs, verdict="informational",
                              log_domain=True, tolerance=cfg.tolerance,
                              provenance=_provenance(g))
            note = note or "no applicable bound (region not dense at this scale or R inadmissible)"
        else:
            rep = BoundReport.compare(name, log_bound, log_emp, tolerance=cfg.tolerance,
                                      log_domain=True, inputs=inputs, provenance=_provenance(g))
        rep.details = {"lp_all": total, "lp_omega": part, "density": dens.to_dict(), **theory}
        if note:
            rep.details["note"] = note
        reports.append(rep)
    return reports


def _provenance(g: WindowSpec) -> str:
    if g.kind == "hermite":
        return "Hermite-window sampling bound eta(n,R) (gamma/C)^(-sigma(n,R))"
    return "planar sampling constant (3/gamma)(1 - 4||g'||R/(pi||g||))^(-2) for compact windows"


def replay(report: dict) -> BoundReport:
    """Re-run the experiment a serialised report came from and return the matching report."""
    cfg = ExperimentConfig.from_dict(report["inputs"]["config"])
    return run_sampling_experiment(cfg)[report["inputs"]["signal_index"]]


# --------------------------------------------------------------------------
# calibration


def _main_bound_log(rep: dict | BoundReport, C: float) -> float:
    inp = rep["inputs"] if isinstance(rep, dict) else rep.inputs
    return thm_main_bound(inp["n"], inp["R"], inp["gamma"], inp["p"],
                          CalibrationConstants(C_numerical=C)).bound_log


def calibrate_constants(reports, tol: float = 1e-3) -> CalibrationConstants:
    """Smallest C >= 1 (to ``tol``) such that every Hermite-window ratio obeys the bound.

    The bound increases with C for C >= 1 and gamma <= 1, so bisection applies.
    The result is an empirical lower bound on any valid C, nothing more.
    """
    reps = [r.to_dict() if isinstance(r, BoundReport) else r for r in reports]
    reps = [r for r in reps if r["name"] == HERMITE_REPORT and r["inputs"]["gamma"] > 0]
    if not reps:
        raise DomainError("no Hermite-window reports to calibrate from")
    logs = [math.log(r["inputs"]["ratio"]) for r in reps]

    def ok(C):
        return all(lr <= _main_bound_log(r, C) for r, lr in zip(reps, logs))

    if ok(1.0):
        return CalibrationConstants(1.0)
    lo, hi = 1.0, 2.0
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise CapabilityError("calibration diverged")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return CalibrationConstants(hi)


# --------------------------------------------------------------------------
# frame bounds


@dataclass
class FrameExperiment:
    window: dict
    R: float = 0.2
    jitter: float = 0.05
    seed: int = 0
    K: int = 8
    x_half: float = 5.0
    xi_half: float = 8.0
    tail_x_factor: float = 1.5
    tail_xi_factor: float = 4.0
    tolerance: float = 0.05
    points: list | None = None  # explicit [[x, xi], ...]; disables lattice generation

    def __post_init__(self):
        if self.points is None and not self.jitter < self.R / 2:
            raise DomainError("jitter must be smaller than R/2")
        if self.K < 1 or self.K > 32:
            raise CapabilityError("subspace dimension must lie in 1..32")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FrameExperiment":
        return cls(**d)


@dataclass(frozen=True)
class FrameResult:
    A_emp: float
    B_emp: float
    B_emp_corrected: float
    tail_trace: float
    A_theory: float | None
    B_theory: float | None
    A_verdict: str
    B_verdict: str
    n_points: int

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def passed(self) -> bool:
        return self.A_verdict != "fail" and self.B_verdict != "fail"


def extreme_eigenvalues(M: np.ndarray, tol: float = 1e-8, max_iter: int = 100_000) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian PSD matrix (inverse / power iteration)."""
    n = M.shape[0]
    if n == 1:
        v = float(M[0, 0].real)
        return v, v
    start = (1.0 + np.arange(n)) / math.sqrt(np.sum((1.0 + np.arange(n)) ** 2)) + 0j

    def iterate(apply):
        # stop on the eigen-residual; the Rayleigh quotient error is then O(tol^2)
        v = start.copy()
        for _ in range(max_iter):
            w = apply(v)
            lam = float(np.real(np.vdot(v, w)))
            if np.linalg.norm(w - lam * v) <= tol * abs(lam):
                return lam
            nrm = np.linalg.norm(w)
            if nrm == 0:
                return 0.0
            v = w / nrm
        raise CapabilityError("eigenvalue iteration did not converge")

    lam_max = iterate(lambda v: M @ v)
    try:
        lu = scipy.linalg.lu_factor(M, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * lam_max:
            return 0.0, lam_max
        inv = iterate(lambda v: scipy.linalg.lu_solve(lu, v))
        lam_min = 1.0 / inv
    except (np.linalg.LinAlgError, ValueError):
        lam_min = 0.0
    return lam_min, lam_max


def _gram(points: np.ndarray, g: WindowSpec, K: int) -> np.ndarray:
    """M_jk = sum_p V_g h_j(z_p) conj(V_g h_k(z_p))."""
    V = np.empty((K, points.size), dtype=complex)
    for j in range(K):
        coeff = np.zeros(K)
        coeff[j] = 1.0
        V[j] = stft_points(Signal.hermite(coeff[: j + 1]), g, points)
    return V @ V.conj().T


def frame_points(exp: FrameExperiment) -> tuple[np.ndarray, np.ndarray]:
    """(kept, tail) phase points; tail covers the extended box outside the kept box."""
    if exp.points is not None:
        pts = np.array([complex(x, y) for x, y in exp.points])
        return pts, np.zeros(0, dtype=complex)
    ext = jittered_lattice(exp.R, exp.jitter, exp.seed, exp.x_half * exp.tail_x_factor,
                           exp.xi_half * exp.tail_xi_factor)
    z = ext.points
    # box membership uses the unjittered lattice site
    site_x = exp.R * np.round(z.real / exp.R)
    site_y = exp.R * np.round(z.imag / exp.R)
    keep = (np.abs(site_x) <= exp.x_half + 1e-9) & (np.abs(site_y) <= exp.xi_half + 1e-9)
    return z[keep], z[~keep]


def empirical_frame_bounds(exp: FrameExperiment) -> FrameResult:
    """Extreme eigenvalues of the frame operator compressed to span{h_0..h_{K-1}}.

    Restricting to a subspace can only raise the lower frame bound, and
    discarding far points only lowers it, so A_emp >= A_theory is a sound
    check.  For B the trace of the discarded points' Gram matrix is added
    back before comparing.
    """
    g = WindowSpec.from_dict(exp.window)
    kept, tail = frame_points(exp)
    M = _gram(kept, g, exp.K)
    A_emp, B_emp = extreme_eigenvalues(M)
    tail_trace = float(np.real(np.trace(_gram(tail, g, exp.K)))) if tail.size else 0.0
    A_th = B_th = None
    if exp.points is None:
        if g.compact:
            fb = compact_frame_bounds(g, exp.R)
            if fb.admissible:
                A_th, B_th = fb.A, fb.B
        else:
            sz = sunzhou_check(g, exp.R)
            if sz.condition_met:
                A_th, B_th = sz.A_lower / exp.R**2, sz.B_upper / exp.R**2
    A_v = "informational" if A_th is None else ("pass" if A_emp >= A_th else "fail")
    B_corr = B_emp + tail_trace
    B_v = "informational" if B_th is None else ("pass" if B_corr <= B_th * (1 + exp.tolerance) else "fail")
    return FrameResult(A_emp, B_emp, B_corr, tail_trace, A_th, B_th, A_v, B_v, int(kept.size))


# --------------------------------------------------------------------------
# gamma sweep over shrinking neighbourhoods of lattice points


def gamma_sweep(window: WindowSpec, spacing: float, sides, signal: Signal, trunc: float = 5.0,
                step: float = 1.0 / 64) -> list[dict]:
    """Squared L^2 sampling ratio for Omega = squares of side s around spacing*(Z + iZ).

    At scale R = 2*spacing every R-square holds exactly four cells, so the
    square density is gamma = (s/spacing)^2 exactly; rows carry ratio^2 * gamma.
    """
    from tfsamp.geometry import Cells

    grid = _grid_for(signal, window, ExperimentConfig(window.to_dict(), "(all)", 2 * spacing,
                                                      trunc=trunc, step=step))
    total = lp_norm(grid, 2.0)
    rows = []
    for s in sides:
        region = Cells(s, spacing)
        dens = density_gamma(region, DensityQuery(2 * spacing, "square"))
        r2 = (total / lp_norm(grid, 2.0, region)) ** 2
        rows.append({"side": s, "gamma": dens.gamma, "ratio_sq": r2, "product": r2 * dens.gamma})
    return rows


# --------------------------------------------------------------------------
# report files


def write_reports(reports: list[BoundReport], outdir, stem: str = "reports") -> tuple[Path, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jpath = outdir / f"{stem}.json"
    jpath.write_text(json.dumps([r.to_dict() for r in reports], indent=1))
    cpath = outdir / f"{stem}.csv"
    with open(cpath, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["name", "signal_index", "n", "R", "p", "gamma", "ratio", "compared_log",
                     "bound_log", "verdict"])
        for r in reports:
            i = r.inputs
            wr.writerow([r.name, i.get("signal_index"), i.get("n"), i.get("R"), i.get("p"),
                         _num(i.get("gamma")), _num(i.get("ratio")), _num(r.empirical_value),
                         _num(r.theoretical_value), r.verdict])
    return jpath, cpath


def _num(v):
    return "" if v is None else repr(float(v))


def load_reports(path) -> list[dict]:
    """Read every report from a JSON file or from all ``*.json`` files in a directory."""
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    out = []
    for fp in files:
        data = json.loads(fp.read_text())
        out.extend(data if isinstance(data, list) else [data])
    return out


# --------------------------------------------------------------------------
# Hermite-window sweeps

SWEEP_REGIONS = {0.25: "(strips 0.125 0.5)", 0.5: "(strips 0.25 0.5)", 1.0: "(all)"}


def hermite_sweep_configs(seed: int, n_experiments: int = 50, signals_per: int = 2, K: int = 8,
                          n_values=(0, 1, 2), R_values=(0.5, 1.0),
                          regions: dict = SWEEP_REGIONS) -> list[ExperimentConfig]:
    """Experiments cycling through (n, R, region) with consecutive seeds from ``seed``.

    ``regions`` maps a nominal density to a region expression; the density
    actually used in each report is the one measured by the density scan.
    """
    combos = [(n, R, g) for n in n_values for R in R_values for g in sorted(regions)]
    out = []
    for i in range(n_experiments):
        n, R, g = combos[i % len(combos)]
        out.append(ExperimentConfig(
            window=WindowSpec.hermite(n).to_dict(), region=regions[g], R=R,
            signals={"family": "random_hermite", "K": K, "count": signals_per, "seed": seed + i},
            name=f"sweep-n{n}-R{R}-g{g}-s{seed + i}"))
    return out
