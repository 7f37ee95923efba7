"""Explicit constants and theoretical sampling bounds.

Every potentially huge constant is carried as a natural logarithm.  The
unnamed numerical constant of the Hermite-window theorem and the two
constants of Brudnyi's Remez inequality are not known numerically; they
enter through :class:`CalibrationConstants`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from tfsamp.errors import CapabilityError, DomainError
from tfsamp.specfun import WindowSpec, nu


@dataclass
class BoundReport:
    """A theoretical value paired with a measured one.

    With ``log_domain`` set, both values are natural logarithms.  The verdict
    is ``pass`` iff empirical <= theoretical * (1 + tolerance).
    """

    name: str
    theoretical_value: float | None
    empirical_value: float | None = None
    inputs: dict = field(default_factory=dict)
    verdict: str = "informational"
    provenance: str = ""
    log_domain: bool = False
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, name, theoretical, empirical, *, tolerance=0.0, log_domain=False, **kw):
        if theoretical is None or empirical is None:
            verdict = "informational"
        elif log_domain:
            verdict = "pass" if empirical <= theoretical + math.log1p(tolerance) else "fail"
        else:
            verdict = "pass" if empirical <= theoretical * (1 + tolerance) else "fail"
        return cls(name, theoretical, empirical, verdict=verdict, tolerance=tolerance,
                   log_domain=log_domain, **kw)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(**d)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)  # "inf" / "nan"; json has no literal for them
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


@dataclass(frozen=True)
class CalibrationConstants:
    C_numerical: float = 1.0
    kappa: float = 1.0
    c_brudnyi: float = 1.0

    def __post_init__(self):
        if min(self.C_numerical, self.kappa, self.c_brudnyi) <= 0:
            raise DomainError("calibration constants must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def n2logn(n: int) -> float:
    """n^2 ln n, read as 0 for n in {0, 1}."""
    return 0.0 if n <= 1 else n * n * math.log(n)


def K_constant(R: float, n: int, gamma_local: float, m: float,
               cal: CalibrationConstants = CalibrationConstants()) -> float:
    """Remez exponent c[ln(gamma/m) + 8 pi R^2 + ln(1/nu_n(R)) + (n+2)^2 ln 4(n+2)].

    ``gamma_local`` is the L^1 mass of |V f| over D(w, 5R), m = |V f(w)|.
    """
    if m <= 0:
        raise DomainError("m must be positive")
    if R <= 0 or gamma_local <= 0:
        raise DomainError("R and gamma must be positive")
    return cal.c_brudnyi * (
        math.log(gamma_local / m) + 8 * math.pi * R * R - math.log(nu(n, R))
        + (n + 2) ** 2 * math.log(4 * (n + 2))
    )


def sup_remez_log_constant(R: float, n: int, gamma_local: float, m: float, omega_area: float,
                           cal: CalibrationConstants = CalibrationConstants()) -> float:
    """log of e^{pi R^2/2} (kappa |D(0,R)| / |Omega|)^K, the local sup-norm Remez factor."""
    K = K_constant(R, n, gamma_local, m, cal)
    return math.pi * R * R / 2 + K * math.log(cal.kappa * math.pi * R * R / omega_area)


def lp_remez_log_constant(R: float, n: int, gamma_local: float, m: float, omega_area: float,
                          cal: CalibrationConstants = CalibrationConstants()) -> float:
    """log of e^{pi R^2/2} (2 kappa |D(0,R)| / |Omega|)^{K+1}, the local L^p Remez factor."""
    K = K_constant(R, n, gamma_local, m, cal)
    return math.pi * R * R / 2 + (K + 1) * math.log(2 * cal.kappa * math.pi * R * R / omega_area)


@dataclass(frozen=True)
class MainBound:
    sigma: float
    eta_log: float
    bound_log: float

    @property
    def bound(self) -> float:
        return math.exp(self.bound_log) if self.bound_log < 700 else math.inf


def sigma_core(n: int, R: float) -> float:
    """R^2 + ln(1/nu_n(R)) + n^2 ln n + 1 (sigma divided by C)."""
    return R * R - math.log(nu(n, R)) + n2logn(n) + 1.0


def thm_main_bound(n: int, R: float, gamma: float, p: float = 2.0,
                   cal: CalibrationConstants = CalibrationConstants()) -> MainBound:
    """Hermite-window sampling bound eta(n,R) (gamma/C)^{-sigma(n,R)} in log form.

    The bound does not depend on p; it is accepted for the record only.
    """
    if not (0 < gamma <= 1):
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if R <= 0:
        raise DomainError("R must be positive")
    if not (1 <= p < math.inf):
        raise DomainError("p must satisfy 1 <= p < inf")
    C = cal.C_numerical
    sigma = C * sigma_core(n, R)
    eta_log = 2 * math.log(R) - math.log(nu(n, R)) + (R * R + 1) * math.log(C)
    return MainBound(sigma, eta_log, eta_log - sigma * (math.log(gamma) - math.log(C)))


def explicit_main_bound_log(n: int, R: float, gamma: float,
                            cal: CalibrationConstants = CalibrationConstants()) -> float:
    """log of 2|D(0,R)| e^{pi R^2/2} nu_n(R)^{-1} (2 kappa / gamma)^{b(R,n)}.

    This is the constant the proof actually produces before it is absorbed
    into eta and sigma; b(R,n) = C (R^2 + ln(1/nu) + n^2 ln n + 1) + 1.
    """
    if not (0 < gamma <= 1):
        raise DomainError("gamma must lie in (0, 1]")
    b = cal.C_numerical * sigma_core(n, R) + 1
    return (math.log(2 * math.pi * R * R) + math.pi * R * R / 2 - math.log(nu(n, R))
            + b * math.log(2 * cal.kappa / gamma))


@dataclass(frozen=True)
class SunZhou:
    Delta: float
    condition_met: bool
    A_lower: float
    B_upper: float


def sunzhou_check(g: WindowSpec, R: float) -> SunZhou:
    """Delta = (2R/pi)(||g'|| + ||tg|| + (2R/pi)||tg'||) and the weighted-system frame bounds."""
    nm = g.norms
    a = 2 * R / math.pi
    delta = a * (nm.deriv_l2 + nm.t_weighted_l2 + a * nm.t_weighted_deriv_l2)
    met = delta < nm.l2
    return SunZhou(delta, met, (nm.l2 - delta) ** 2 if met else 0.0, (nm.l2 + delta) ** 2)


@dataclass(frozen=True)
class CompactFrameBounds:
    R_g: float
    admissible: bool
    A: float
    B: float


def admissible_scale(g: WindowSpec) -> float:
    if not g.compact:
        raise CapabilityError("R(g) is only available for compactly supported windows")
    nm = g.norms
    return min(math.pi * nm.l2 / (4 * nm.deriv_l2), 1 / (2 * g.S))


def compact_frame_bounds(g: WindowSpec, R: float) -> CompactFrameBounds:
    """Frame bounds for jittered lattices |z_{n,m} - R(n + i m)| < R/2 (per coordinate)."""
    Rg = admissible_scale(g)
    nm = g.norms
    A = (nm.l2 - 4 * R / math.pi * nm.deriv_l2) ** 2 / (3 * R * R)
    B = 2 / (R * R) * (nm.l2 + 2 * R / math.pi * nm.deriv_l2) ** 2
    return CompactFrameBounds(Rg, 0 < R < Rg, A, B)


def planar_sampling_bound(g: WindowSpec, R: float, gamma: float) -> float:
    """||g||^2 / (A R^2) / gamma for (gamma, R)-dense sets (square density).

    Bounds int_C |V_g f|^2 by this constant times int_Omega |V_g f|^2.
    """
    if not (0 < gamma <= 1):
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    fb = compact_frame_bounds(g, R)
    if not fb.admissible:
        raise DomainError(f"R={R} is not below R(g)={fb.R_g}")
    return g.norms.l2**2 / (fb.A * R * R) / gamma


def planar_sampling_bound_closed(g: WindowSpec, R: float, gamma: float) -> float:
    """(3/gamma)(1 - 4 ||g'|| R / (pi ||g||))^{-2}."""
    nm = g.norms
    return 3 / gamma * (1 - 4 * nm.deriv_l2 * R / (math.pi * nm.l2)) ** -2


def heisenberg_bound(g: WindowSpec, poly, R: float, eps_grid, *, search_halfwidth: float = 4.0,
                     cal: CalibrationConstants = CalibrationConstants(),
                     raster_step: float | None = None) -> BoundReport:
    """Constant C with int |p(z, conj z) V_g f|^2 >= C ||f||^2 via level sets {|p| >= eps}.

    For each eps the level set's density gamma(eps) gives a sampling constant
    C_s and the candidate eps^2 ||g||^2 / C_s; the best candidate is reported.
    Compact windows use square density and the planar bound; Hermite windows
    use disc density and the squared Hermite-window bound with ``cal``.
    """
    from tfsamp.geometry import DensityQuery, LevelSet, density_gamma

    coeffs = tuple(complex(c) if complex(c).imag else float(complex(c).real) for c in poly)
    if not any(c != 0 for c in coeffs):
        raise DomainError("polynomial must be nonzero")
    mode = "square" if g.compact else "disc"
    if g.compact and not compact_frame_bounds(g, R).admissible:
        raise DomainError("R is not admissible for this window")
    rows = []
    best, best_eps = 0.0, None
    for eps in eps_grid:
        dens = density_gamma(LevelSet(coeffs, float(eps)),
                             DensityQuery(R, mode, raster_step, search_halfwidth))
        gam = min(1.0, dens.gamma_conservative)
        if gam <= 0:
            rows.append({"eps": eps, "gamma": dens.gamma, "candidate": None})
            continue
        if g.compact:
            cs = planar_sampling_bound(g, R, gam)
        else:
            cs = math.exp(2 * thm_main_bound(g.n, R, gam, 2.0, cal).bound_log)
        cand = eps**2 * g.norms.l2**2 / cs
        rows.append({"eps": eps, "gamma": dens.gamma, "gamma_used": gam, "sampling_constant": cs,
                     "candidate": cand})
        if cand > best:
            best, best_eps = cand, eps
    inputs = {"R": R, "window": g.to_dict(), "poly": [complex(c) for c in coeffs]}
    if best_eps is None:
        return BoundReport("heisenberg", None, inputs=inputs, verdict="informational",
                           provenance="Heisenberg-type inequality", details={"sweep": rows,
                           "note": "no eps on the grid gives a relatively dense level set"})
    return BoundReport("heisenberg", best, inputs=inputs, verdict="informational",
                       provenance="Heisenberg-type inequality",
                       details={"eps": best_eps, "sweep": rows})
