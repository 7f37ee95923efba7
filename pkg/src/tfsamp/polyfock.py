"""Polyanalytic polynomials, Balk-type bounds, the reduced Cauchy formula and Remez ratios.

A polyanalytic polynomial of order n is F(z) = sum_k F_k(z) conj(z)^k with
holomorphic polynomial components F_k.  Suprema over discs are estimated by
dense polar sampling; where an upper bound is needed the sampled value is
inflated by a Lipschitz bound times the sampling mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tfsamp.bounds import BoundReport, CalibrationConstants
from tfsamp.errors import DomainError, PreconditionError
from tfsamp.geometry import Region
from tfsamp.specfun import WindowSpec, check_hermite_index
from tfsamp.tfcore import Signal, stft_points

SLACK = 1e-9


def _poly(coeffs, z):
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


@dataclass(frozen=True, eq=False)
class PolyFunction:
    """F(z) = sum_k F_k(z) conj(z)^k, each F_k given by ascending coefficients."""

    components: tuple

    def __post_init__(self):
        comps = tuple(np.atleast_1d(np.asarray(c, dtype=complex)) for c in self.components)
        if not comps:
            raise DomainError("need at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def order(self) -> int:
        nz = [k for k, c in enumerate(self.components) if np.any(c != 0)]
        return nz[-1] if nz else 0

    @property
    def is_zero(self) -> bool:
        return not any(np.any(c != 0) for c in self.components)

    def component(self, k: int, z) -> np.ndarray:
        return _poly(self.components[k], np.asarray(z, dtype=complex))

    def __call__(self, z):
        return poly_eval(self, z)

    def scaled(self, s: complex) -> "PolyFunction":
        return PolyFunction(tuple(s * c for c in self.components))

    def lipschitz(self, radius: float) -> float:
        """Bound on |F(z) - F(w)| / |z - w| over D(0, radius)."""
        L = 0.0
        for k, c in enumerate(self.components):
            for j, a in enumerate(c):
                if j + k > 0:
                    L += abs(a) * (j + k) * radius ** (j + k - 1)
        return L

    def to_dict(self) -> dict:
        return {"components": [[[a.real, a.imag] for a in c] for c in self.components]}

    @classmethod
    def from_dict(cls, d: dict) -> "PolyFunction":
        def cplx(a):
            if isinstance(a, (list, tuple)):
                return complex(*a)
            if isinstance(a, str):
                return complex(a.replace("i", "j"))
            return complex(a)

        return cls(tuple(np.array([cplx(a) for a in c]) for c in d["components"]))


def random_polyfunction(rng: np.random.Generator, order: int, degree: int) -> PolyFunction:
    """Components of the given degree with coefficients uniform in the unit disc."""
    comps = []
    for _ in range(order + 1):
        r = np.sqrt(rng.uniform(0, 1, degree + 1))
        th = rng.uniform(0, 2 * np.pi, degree + 1)
        comps.append(r * np.exp(1j * th))
    return PolyFunction(tuple(comps))


def poly_eval(F: PolyFunction, z):
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    out = np.zeros_like(z)
    for k in range(len(F.components) - 1, -1, -1):
        out = out * zc + F.component(k, z)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ReducedPolyFunction:
    """F(z) = sum_k H_k(z) |z|^{2k}."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components",
                           tuple(np.atleast_1d(np.asarray(c, dtype=complex)) for c in self.components))

    @property
    def order(self) -> int:
        return len(self.components) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        r2 = (z * np.conj(z)).real
        out = np.zeros_like(z)
        for k in range(len(self.components) - 1, -1, -1):
            out = out * r2 + _poly(self.components[k], z)
        return out


def phi_extension_eval(F: PolyFunction, z1, z2):
    """Phi(F)(z1, z2) = sum_k F_k(z1 + i z2) (z1 - i z2)^k, holomorphic on C^2."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    u = z1 + 1j * z2
    v = z1 - 1j * z2
    out = np.zeros(np.broadcast(u, v).shape, dtype=complex)
    for k in range(len(F.components) - 1, -1, -1):
        out = out * v + F.component(k, u)
    return complex(out) if out.ndim == 0 else out


def bargmann_transform(f: Signal, n: int, z) -> np.ndarray | complex:
    """B^{n+1} f(z) = V_{h_n} f(conj z) e^{-pi (z^2 - conj(z)^2)/4} e^{pi |z|^2 / 2}.

    With V_g f(x + i xi) = <f, M_xi T_x g>, the unimodular factor
    e^{-pi i x xi} (not its conjugate) is the one that makes the result
    polyanalytic of order n.  Magnitudes do not depend on this choice.
    """
    n = check_hermite_index(n)
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) > 8):
        raise DomainError("|z| > 8: the weight e^{pi|z|^2/2} exceeds the overflow guard")
    v = stft_points(f, WindowSpec.hermite(n), np.conj(za))
    out = v * np.exp(-np.pi * (za**2 - np.conj(za) ** 2) / 4) * np.exp(np.pi * np.abs(za) ** 2 / 2)
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Balk constants


@dataclass(frozen=True)
class LogValue:
    log: float

    @property
    def value(self) -> float:
        return math.exp(self.log) if self.log < 709 else math.inf


def balk_Dn(n: int, lam: float) -> LogValue:
    """D_n(lambda) = (2 lambda / (lambda - 1))^{n+2} (n+2)^{(n+2)^2}."""
    if not lam > 1:
        raise DomainError("lambda must exceed 1")
    return LogValue((n + 2) * math.log(2 * lam / (lam - 1)) + (n + 2) ** 2 * math.log(n + 2))


def top_component_log_constant(n: int, lam: float) -> float:
    """log (2 lambda (n+2) / (lambda - 1))^{n+2}."""
    return (n + 2) * math.log(2 * lam * (n + 2) / (lam - 1))


def phi_log_constant(n: int) -> float:
    """log (4(n+2))^{(n+2)^2}."""
    return (n + 2) ** 2 * math.log(4 * (n + 2))


@dataclass(frozen=True)
class SupEstimate:
    lower: float  # sampled maximum
    upper: float  # sampled maximum + Lipschitz * mesh


def polar_samples(radius: float, n_r: int, n_t: int) -> tuple[np.ndarray, float]:
    """Polar grid on the closed disc D(0, radius) and its covering radius."""
    r = radius * np.arange(n_r) / (n_r - 1)
    th = 2 * np.pi * np.arange(n_t) / n_t
    z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    mesh = radius / (n_r - 1) / 2 + radius * np.pi / n_t
    return z, mesh


def sup_on_disc(func, radius: float, lipschitz: float, n_r: int = 512, n_t: int = 512) -> SupEstimate:
    z, mesh = polar_samples(radius, n_r, n_t)
    m = float(np.max(np.abs(func(z))))
    return SupEstimate(m, m + lipschitz * mesh)


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def component_bound_check(F: PolyFunction, R: float, lam: float, n_r: int = 512,
                          n_t: int = 512) -> BoundReport:
    """Check sup_{D(0,R)} |F_k z^k| <= D_n M and the top-component bound on D(0,(1+lam)R/2).

    M is the sampled sup of |F| over D(0, lam R) (a lower bound, which only
    makes the check stricter); left sides use Lipschitz-inflated upper bounds.
    All comparisons are in log domain.
    """
    if F.is_zero:
        raise DomainError("F must not vanish identically")
    if not (lam > 1 and R > 0):
        raise DomainError("need lambda > 1 and R > 0")
    n = F.order
    M = sup_on_disc(F, lam * R, 0.0, n_r, n_t).lower
    logM = _log(M)
    logD = balk_Dn(n, lam).log
    rows = []
    worst = -math.inf
    for k in range(n + 1):
        def fk(z, c=F.components[k], k=k):
            return _poly(c, z) * z**k

        lip = PolyFunction(((np.concatenate([np.zeros(k), F.components[k]])),)).lipschitz(R)
        est = sup_on_disc(fk, R, lip, n_r, n_t)
        margin = _log(est.upper) - (logD + logM)
        worst = max(worst, margin)
        rows.append({"k": k, "lhs_upper": est.upper, "lhs_sampled": est.lower, "log_margin": margin})
    rho = (1 + lam) * R / 2
    top = np.concatenate([np.zeros(n), F.components[n]])
    est_top = sup_on_disc(lambda z: _poly(top, z), rho, PolyFunction((top,)).lipschitz(rho), n_r, n_t)
    top_margin = _log(est_top.upper) - (logM + top_component_log_constant(n, lam))
    verdict = "pass" if worst <= SLACK and top_margin <= SLACK else "fail"
    return BoundReport(
        name="polyanalytic_component_bounds",
        theoretical_value=logD + logM,
        empirical_value=_log(max(r["lhs_upper"] for r in rows)),
        inputs={"R": R, "lambda": lam, "order": n},
        verdict=verdict,
        provenance="Balk maximum modulus lemma; top-component estimate",
        log_domain=True,
        details={"M_sampled": M, "log_Dn": logD, "components": rows,
                 "top_component": {"radius": rho, "lhs_upper": est_top.upper,
                                   "log_rhs": logM + top_component_log_constant(n, lam),
                                   "log_margin": top_margin}},
    )


def phi_bound_check(F: PolyFunction, R: float, rng: np.random.Generator, n_samples: int = 20000,
                    n_r: int = 512, n_t: int = 512) -> BoundReport:
    """sup over B_C(0, 2R) of |Phi(F)| against (4(n+2))^{(n+2)^2} sup_{D(0,4R)} |F|.

    Points are drawn on the sphere of radius 2R in C^2 (where the maximum of
    a holomorphic function lives), half uniformly and half with real (z1, z2)
    coordinates, plus interior points.
    """
    if F.is_zero:
        raise DomainError("F must not vanish identically")
    n = F.order
    g = rng.standard_normal((n_samples, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    half = n_samples // 2
    g[:half, 1] = 0.0
    g[:half, 3] = 0.0
    g[:half] /= np.linalg.norm(g[:half], axis=1, keepdims=True)
    radii = 2 * R * np.where(rng.uniform(size=n_samples) < 0.8, 1.0, rng.uniform(size=n_samples) ** 0.25)
    pts = g * radii[:, None]
    z1 = pts[:, 0] + 1j * pts[:, 1]
    z2 = pts[:, 2] + 1j * pts[:, 3]
    lhs = float(np.max(np.abs(phi_extension_eval(F, z1, z2))))
    M = sup_on_disc(F, 4 * R, 0.0, n_r, n_t).lower
    log_rhs = phi_log_constant(n) + _log(M)
    return BoundReport.compare("phi_extension_bound", log_rhs, _log(lhs), log_domain=True,
                               tolerance=SLACK, inputs={"R": R, "order": n},
                               provenance="sup of the C^2 extension over B(0,2R)",
                               details={"sup_phi_sampled": lhs, "M_sampled": M})


def reduced_cauchy_eval(F: ReducedPolyFunction, radii, z, nodes: int = 2048):
    """Rebuild F(z) from its values on the circles |t| = R_k via the polyanalytic Cauchy formula.

    F(z) = sum_k P_k(|z|^2) (1/2 pi i) oint_{|t|=R_k} F(t) / (t - z) dt,
    P_k(s) = prod_{j != k} (R_j^2 - s) / (R_j^2 - R_k^2).
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size != F.order + 1:
        raise DomainError(f"need {F.order + 1} radii for order {F.order}")
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise DomainError("radii must be positive and strictly increasing")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= radii[0]):
        raise DomainError("z must lie inside the smallest circle")
    s = (z * np.conj(z)).real
    theta = 2 * np.pi * np.arange(nodes) / nodes
    out = np.zeros(z.shape, dtype=complex)
    for k, Rk in enumerate(radii):
        t = Rk * np.exp(1j * theta)
        ft = F(t)
        # (1/2 pi i) oint F(t)/(t - z) dt with dt = i t dtheta
        integral = np.mean(ft * t / (t[None, :] - z.reshape(-1, 1)), axis=1).reshape(z.shape)
        Pk = np.ones(z.shape)
        for j, Rj in enumerate(radii):
            if j != k:
                Pk = Pk * (Rj**2 - s) / (Rj**2 - Rk**2)
        out = out + Pk * integral
    return complex(out) if out.ndim == 0 else out


def weighted_lp_norm(F: PolyFunction, p: float, region: Region | None = None, trunc: float = 6.0,
                     step: float = 1.0 / 32) -> float:
    """(int over region ∩ D(0, trunc) of |F|^p e^{-pi p |z|^2 / 2})^{1/p} by midpoint grid."""
    if not (1 <= p < math.inf):
        raise DomainError("p must satisfy 1 <= p < inf")
    m = int(round(2 * trunc / step))
    u = -trunc + (np.arange(m) + 0.5) * step
    X, Y = np.meshgrid(u, u, indexing="ij")
    Z = X + 1j * Y
    mask = np.abs(Z) <= trunc
    if region is not None:
        mask &= np.broadcast_to(region.contains(X, Y), mask.shape)
    vals = np.abs(poly_eval(F, Z[mask])) ** p * np.exp(-np.pi * p * np.abs(Z[mask]) ** 2 / 2)
    return (float(np.sum(vals)) * step * step) ** (1 / p)


@dataclass(frozen=True)
class RemezResult:
    m: float
    M: float
    sup_left: float
    sup_left_upper: float
    sup_omega: float
    omega_area: float
    disc_area: float
    exponent: float
    log_right: float
    c_hat: float | None
    verdict: str

    @property
    def sup_right(self) -> float:
        return math.exp(self.log_right) if self.log_right < 709 else math.inf

    def to_dict(self) -> dict:
        return {"m": self.m, "M": self.M, "sup_left": self.sup_left,
                "sup_left_upper": self.sup_left_upper, "sup_omega": self.sup_omega,
                "sup_right": self.sup_right, "log_sup_right": self.log_right,
                "omega_area": self.omega_area, "disc_area": self.disc_area,
                "exponent": self.exponent, "c_hat": self.c_hat, "verdict": self.verdict}


def remez_ratio(F: PolyFunction, region: Region, rho: float, R: float,
                cal: CalibrationConstants = CalibrationConstants(), *, raster_step: float | None = None,
                n_r: int = 512, n_t: int = 512, tolerance: float = 0.05) -> RemezResult:
    """Remez-type comparison of sup_{D(0,rho)} |F| with sup_Omega |F| for Omega ⊂ D(0,R).

    Right side: (kappa |D(0,rho)| / |Omega|)^{c [ln(M/m) + (n+2)^2 ln 4(n+2)]} sup_Omega |F|
    with M the sampled sup over D(0, 4R) and m = |F(0)|.  ``c_hat`` is the
    exponent that would make the inequality an equality.
    """
    if not (0 < rho <= R):
        raise DomainError("need 0 < rho <= R")
    m = abs(poly_eval(F, 0j))
    if m == 0:
        raise PreconditionError("the inequality requires F(0) != 0")
    step = raster_step if raster_step is not None else R / 256
    k = int(math.ceil(2 * R / step))
    u = -2 * R + (np.arange(2 * k) + 0.5) * (4 * R / (2 * k))
    pix = 4 * R / (2 * k)
    X, Y = np.meshgrid(u, u, indexing="ij")
    member = np.broadcast_to(region.contains(X, Y), X.shape)
    outside = X**2 + Y**2 > R * R
    if np.any(member & outside):
        raise PreconditionError("region is not contained in D(0, R)")
    pts = (X + 1j * Y)[member]
    area = pts.size * pix * pix
    if area == 0:
        raise DomainError("region has zero measure at this raster resolution")
    n = F.order
    sup_omega = float(np.max(np.abs(poly_eval(F, pts))))
    left = sup_on_disc(F, rho, F.lipschitz(rho), n_r, n_t)
    M = sup_on_disc(F, 4 * R, 0.0, n_r, n_t).lower
    disc_area = math.pi * rho * rho
    base = math.log(cal.kappa * disc_area / area)
    exponent = cal.c_brudnyi * (math.log(M / m) + phi_log_constant(n))
    log_right = exponent * base + _log(sup_omega)
    c_hat = None
    if base > 0:
        c_hat = math.log(left.lower / sup_omega) / base
    ok = _log(left.upper) <= log_right + math.log1p(tolerance)
    return RemezResult(m, M, left.lower, left.upper, sup_omega, area, disc_area, exponent,
                       log_right, c_hat, "pass" if ok else "fail")
