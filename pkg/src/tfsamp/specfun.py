"""Special functions, quadrature and analysis windows.

Hermite functions follow the normalisation

    h_n(t) = c_n e^{pi t^2} (d/dt)^n e^{-2 pi t^2},   ||h_n||_2 = 1,  c_n > 0,

so h_n(t) = (-1)^n (2 pi)^{1/4} psi_n(sqrt(2 pi) t) with psi_n the usual
orthonormal Hermite functions of the variable x = sqrt(2 pi) t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from tfsamp.errors import CapabilityError, DomainError

HERMITE_CAP = 16
QUAD_TOL = 1e-12
MAX_PANELS = 2**14
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def check_hermite_index(n: int) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"Hermite index must be a non-negative integer, got {n!r}")
    if n > HERMITE_CAP:
        raise CapabilityError(f"Hermite index {n} exceeds the supported cap {HERMITE_CAP}")
    return int(n)


@lru_cache(maxsize=None)
def hermite_constant(n: int) -> float:
    """Positive normalising constant c_n of the Rodrigues form."""
    check_hermite_index(n)
    # (d/dt)^n e^{-2 pi t^2} = (-1)^n (2 pi)^{n/2} H_n(sqrt(2 pi) t) e^{-2 pi t^2}
    return (2.0 * math.pi) ** (0.25 - n / 2.0) / math.sqrt(
        2.0**n * math.factorial(n) * math.sqrt(math.pi)
    )


def hermite_table(nmax: int, t) -> np.ndarray:
    """Return ``[h_0(t), ..., h_nmax(t)]`` stacked along a new leading axis.

    No index cap is applied here; signal expansions may use more terms than
    windows are allowed to.
    """
    t = np.asarray(t, dtype=float)
    x = _SQRT_2PI * t
    out = np.empty((nmax + 1,) + t.shape)
    prev = np.zeros_like(t)
    cur = 2.0**0.25 * np.exp(-math.pi * t * t)
    out[0] = cur
    for k in range(nmax):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        out[k + 1] = cur
    signs = np.where(np.arange(nmax + 1) % 2 == 0, 1.0, -1.0)
    return out * signs.reshape((-1,) + (1,) * t.ndim)


def hermite_eval(n: int, t):
    """Evaluate h_n at ``t`` (scalar or array)."""
    n = check_hermite_index(n)
    vals = hermite_table(n, t)[n]
    return float(vals) if np.ndim(vals) == 0 else vals


def hermite_deriv(n: int, t):
    """h_n'(t) = -sqrt(2 pi) [sqrt(n/2) h_{n-1} + sqrt((n+1)/2) h_{n+1}]."""
    n = check_hermite_index(n)
    tab = hermite_table(n + 1, t)
    lower = tab[n - 1] if n > 0 else 0.0
    vals = -_SQRT_2PI * (math.sqrt(n / 2.0) * lower + math.sqrt((n + 1) / 2.0) * tab[n + 1])
    return float(vals) if np.ndim(vals) == 0 else vals


@lru_cache(maxsize=None)
def hermite_support(nmax: int, eps: float = 1e-16) -> float:
    """Half-width beyond which |h_k| < eps for every k <= nmax."""
    t = np.arange(0.0, 20.0, 1.0 / 64)
    big = np.max(np.abs(hermite_table(nmax, t)), axis=0) >= eps
    return float(t[np.nonzero(big)[0][-1]] + 1.0 / 64)


def laguerre_eval(n: int, t):
    """Laguerre polynomial L_n(t) via (k+1) L_{k+1} = (2k+1-t) L_k - k L_{k-1}."""
    if int(n) != n or n < 0:
        raise DomainError(f"Laguerre degree must be a non-negative integer, got {n!r}")
    t = np.asarray(t, dtype=float)
    prev = np.zeros_like(t)
    cur = np.ones_like(t)
    for k in range(int(n)):
        prev, cur = cur, ((2 * k + 1 - t) * cur - k * prev) / (k + 1)
    return float(cur) if cur.ndim == 0 else cur


def adaptive_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    order: int = 16,
    max_panels: int = MAX_PANELS,
) -> float:
    """Integrate ``func`` over [a, b] by bisecting Gauss-Legendre panels.

    A panel is accepted once its two halves agree with the whole to within
    its length-proportional share of ``tol``.  Panels are processed in a
    fixed order so the result is reproducible bit for bit.
    """
    if b == a:
        return 0.0
    nodes, weights = leggauss(order)

    def rule(lo: float, hi: float) -> float:
        half = 0.5 * (hi - lo)
        return half * float(np.dot(weights, func(0.5 * (lo + hi) + half * nodes)))

    length = abs(b - a)
    stack = [(a, b, rule(a, b))]
    accepted: list[float] = []
    panels = 1
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        if abs(left + right - whole) <= tol * abs(hi - lo) / length:
            accepted.append(left + right)
            continue
        panels += 1
        if panels > max_panels:
            raise CapabilityError(f"quadrature did not converge within {max_panels} panels")
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))
    return math.fsum(accepted)


@lru_cache(maxsize=4096)
def nu(n: int, R: float) -> float:
    """Local reproducing constant  int_0^{pi R^2} L_n(t)^2 e^{-t} dt."""
    if R <= 0:
        raise DomainError(f"R must be positive, got {R}")
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    upper = math.pi * R * R
    return adaptive_gauss_legendre(lambda t: laguerre_eval(n, t) ** 2 * np.exp(-t), 0.0, upper)


@dataclass(frozen=True)
class WindowNorms:
    l2: float
    deriv_l2: float
    t_weighted_l2: float
    t_weighted_deriv_l2: float


@dataclass(frozen=True, eq=False)
class WindowSpec:
    """Analysis window g: ``hermite`` (h_n), ``hat`` (1 - |t|/S on [-S, S]) or ``sampled``.

    Sampled windows are the piecewise-linear interpolant of ``samples`` on the
    grid ``-S + j*step`` and vanish outside [-S, S].  ``amplitude`` rescales
    any window.
    """

    kind: str
    n: int = 0
    S: float = 0.0
    samples: np.ndarray | None = field(default=None, repr=False)
    step: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind == "hermite":
            check_hermite_index(self.n)
        elif self.kind == "hat":
            if not self.S > 0:
                raise DomainError("hat window needs S > 0")
        elif self.kind == "sampled":
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 1 or s.size < 3:
                raise DomainError("sampled window needs at least 3 samples")
            if not self.step > 0 or not self.S > 0:
                raise DomainError("sampled window needs positive S and step")
            if abs(-self.S + (s.size - 1) * self.step - self.S) > 1e-9 * max(1.0, self.S):
                raise DomainError("samples must cover [-S, S] on the declared step")
            object.__setattr__(self, "samples", s)
        else:
            raise DomainError(f"unknown window kind {self.kind!r}")
        if self.amplitude == 0:
            raise DomainError("window must be nonzero")

    @classmethod
    def hermite(cls, n: int, amplitude: float = 1.0) -> "WindowSpec":
        return cls("hermite", n=n, amplitude=amplitude)

    @classmethod
    def hat(cls, S: float, amplitude: float = 1.0) -> "WindowSpec":
        return cls("hat", S=S, amplitude=amplitude)

    @classmethod
    def sampled(cls, samples, S: float, step: float, amplitude: float = 1.0) -> "WindowSpec":
        return cls("sampled", samples=np.asarray(samples, dtype=float), S=S, step=step,
                   amplitude=amplitude)

    @classmethod
    def from_string(cls, text: str) -> "WindowSpec":
        """Parse ``hermite:n`` or ``hat:S``."""
        kind, _, arg = text.partition(":")
        if kind == "hermite":
            return cls.hermite(int(arg))
        if kind == "hat":
            return cls.hat(float(arg))
        raise DomainError(f"cannot parse window {text!r}; expected hermite:n or hat:S")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "amplitude": self.amplitude}
        if self.kind == "hermite":
            d["n"] = self.n
        else:
            d["S"] = self.S
        if self.kind == "sampled":
            d["samples"] = self.samples.tolist()
            d["step"] = self.step
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WindowSpec":
        amp = d.get("amplitude", 1.0)
        if d["kind"] == "hermite":
            return cls.hermite(d["n"], amp)
        if d["kind"] == "hat":
            return cls.hat(d["S"], amp)
        return cls.sampled(d["samples"], d["S"], d["step"], amp)

    @property
    def compact(self) -> bool:
        return self.kind != "hermite"

    @property
    def support_halfwidth(self) -> float:
        if self.kind == "hermite":
            return hermite_support(self.n)
        return self.S

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "hermite":
            vals = hermite_table(self.n, t)[self.n]
        elif self.kind == "hat":
            vals = np.clip(1.0 - np.abs(t) / self.S, 0.0, None)
        else:
            grid = -self.S + self.step * np.arange(self.samples.size)
            vals = np.interp(t, grid, self.samples, left=0.0, right=0.0)
        return self.amplitude * vals

    @cached_property
    def norms(self) -> WindowNorms:
        return window_norms(self)


def window_norms(w: WindowSpec) -> WindowNorms:
    """||g||_2, ||g'||_2, ||t g||_2 and ||t g'||_2."""
    a = abs(w.amplitude)
    if w.kind == "hermite":
        n = w.n
        return WindowNorms(
            l2=a,
            deriv_l2=a * math.sqrt(2.0 * math.pi * (n + 0.5)),
            t_weighted_l2=a * math.sqrt((n + 0.5) / (2.0 * math.pi)),
            t_weighted_deriv_l2=a * math.sqrt((2 * n * n + 2 * n + 3) / 4.0),
        )
    if w.kind == "hat":
        S = w.S
        return WindowNorms(
            l2=a * math.sqrt(2.0 * S / 3.0),
            deriv_l2=a * math.sqrt(2.0 / S),
            t_weighted_l2=a * math.sqrt(S**3 / 15.0),
            t_weighted_deriv_l2=a * math.sqrt(2.0 * S / 3.0),
        )
    s = a * w.samples
    t = -w.S + w.step * np.arange(s.size)
    ds = np.gradient(s, w.step)

    def trap(v):
        return math.sqrt(float(np.trapezoid(v * v, dx=w.step)))

    return WindowNorms(trap(s), trap(ds), trap(t * s), trap(t * ds))
