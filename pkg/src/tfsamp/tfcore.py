"""Short-time Fourier transform engine.

    V_g f(x + i xi) = <f, M_xi T_x g> = int f(t) conj(g(t - x)) e^{-2 pi i xi t} dt

Integrals are taken over the (effective) support of the shifted window
with a window-adapted rule: trapezoid for Hermite windows (spectrally
accurate for these Gaussian-decaying integrands), piecewise Gauss-Legendre
between the kinks of the hat window, and the sample grid for sampled
windows.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from tfsamp.errors import DomainError
from tfsamp.geometry import Region
from tfsamp.specfun import WindowSpec, check_hermite_index, hermite_support, hermite_table, laguerre_eval, nu

DEFAULT_DT = 1.0 / 32
HAT_GL_ORDER = 96
MAX_EXPANSION = 32


@dataclass(frozen=True, eq=False)
class Signal:
    """A finite Hermite expansion sum_k a_k h_k, or uniform samples on [-T, T]."""

    kind: str
    coefficients: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)
    T: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        if self.kind == "hermite":
            a = np.asarray(self.coefficients, dtype=complex).ravel()
            if a.size == 0 or a.size > MAX_EXPANSION + 1:
                raise DomainError(f"expansion needs 1..{MAX_EXPANSION + 1} coefficients")
            if not np.any(a != 0):
                raise DomainError("signal must be nonzero")
            object.__setattr__(self, "coefficients", a)
        elif self.kind == "sampled":
            v = np.asarray(self.values, dtype=complex).ravel()
            if not np.any(v != 0):
                raise DomainError("signal must be nonzero")
            if not (self.T > 0 and 0 < self.h <= self.T / 64):
                raise DomainError("sampled signal needs T > 0 and 0 < h <= T/64")
            if abs(-self.T + (v.size - 1) * self.h - self.T) > 1e-9 * self.T:
                raise DomainError("samples must cover [-T, T] on step h")
            object.__setattr__(self, "values", v)
        else:
            raise DomainError(f"unknown signal kind {self.kind!r}")

    @classmethod
    def hermite(cls, coefficients) -> "Signal":
        return cls("hermite", coefficients=coefficients)

    @classmethod
    def sampled(cls, values, T: float, h: float) -> "Signal":
        return cls("sampled", values=values, T=T, h=h)

    @property
    def norm(self) -> float:
        if self.kind == "hermite":
            return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))
        return math.sqrt(float(np.trapezoid(np.abs(self.values) ** 2, dx=self.h)))

    @property
    def support_halfwidth(self) -> float:
        if self.kind == "hermite":
            return hermite_support(self.coefficients.size - 1)
        return self.T

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "hermite":
            tab = hermite_table(self.coefficients.size - 1, t)
            return np.tensordot(self.coefficients, tab, axes=(0, 0))
        grid = -self.T + self.h * np.arange(self.values.size)
        re = np.interp(t, grid, self.values.real, left=0.0, right=0.0)
        im = np.interp(t, grid, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def shifted(self, a: float) -> "Signal":
        """T_a f for sampled signals (the grid moves with the signal)."""
        if self.kind != "sampled":
            raise DomainError("only sampled signals can be shifted exactly")
        T = self.T + abs(a)
        n = int(round(2 * T / self.h)) + 1
        t = -T + self.h * np.arange(n)
        return Signal.sampled(self(t - a), T=(n - 1) * self.h / 2, h=self.h)

    def to_dict(self) -> dict:
        if self.kind == "hermite":
            return {"kind": "hermite",
                    "coefficients": [[c.real, c.imag] for c in self.coefficients]}
        return {"kind": "sampled", "T": self.T, "h": self.h,
                "values": [[c.real, c.imag] for c in self.values]}

    @classmethod
    def from_dict(cls, d: dict) -> "Signal":
        def cplx(seq):
            return np.array([complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in seq])

        if d["kind"] == "hermite":
            return cls.hermite(cplx(d["coefficients"]))
        return cls.sampled(cplx(d["values"]), d["T"], d["h"])


def random_expansion(K: int, rng: np.random.Generator) -> Signal:
    """Unit-norm expansion over h_0..h_{K-1} with complex Gaussian coefficients."""
    a = rng.standard_normal(K) + 1j * rng.standard_normal(K)
    return Signal.hermite(a / np.linalg.norm(a))


@dataclass(frozen=True)
class PhasePoint:
    x: float
    xi: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.xi)


def _as_complex(z) -> np.ndarray:
    if isinstance(z, PhasePoint):
        return np.array([z.z])
    return np.asarray(z, dtype=complex)


@lru_cache(maxsize=64)
def _rule_cached(key):
    kind, a, b = key
    if kind == "hermite":
        T = hermite_support(int(a))
        k = int(math.ceil(T / b))
        s = b * np.arange(-k, k + 1)
        return s, np.full(s.size, b)
    if kind == "hat":
        u, w = leggauss(int(b))
        S = a
        s = np.concatenate([-S / 2 + S / 2 * u, S / 2 + S / 2 * u])
        return s, np.concatenate([S / 2 * w, S / 2 * w])
    raise AssertionError(kind)


def window_rule(g: WindowSpec, dt: float = DEFAULT_DT):
    """Nodes s_j, weights w_j and window values g(s_j) over the window support."""
    if g.kind == "hermite":
        s, w = _rule_cached(("hermite", g.n, dt))
    elif g.kind == "hat":
        s, w = _rule_cached(("hat", g.S, HAT_GL_ORDER))
    else:
        s = -g.S + g.step * np.arange(g.samples.size)
        w = np.full(s.size, g.step)
        w[0] = w[-1] = g.step / 2
    return s, w, np.conj(g(s))


def stft_points(f: Signal, g: WindowSpec, z, dt: float = DEFAULT_DT) -> np.ndarray:
    """V_g f at an array of phase points (complex x + i xi)."""
    z = _as_complex(z)
    shape = z.shape
    z = z.ravel()
    s, w, gs = window_rule(g, dt)
    wg = w * gs
    out = np.empty(z.size, dtype=complex)
    chunk = max(1, 2_000_000 // s.size)
    for a in range(0, z.size, chunk):
        zz = z[a : a + chunk]
        t = zz.real[:, None] + s[None, :]
        phase = np.exp(-2j * np.pi * zz.imag[:, None] * t)
        out[a : a + chunk] = np.sum(f(t) * wg * phase, axis=1)
    return out.reshape(shape)


def stft_eval(f: Signal, g: WindowSpec, z, dt: float = DEFAULT_DT) -> complex:
    return complex(stft_points(f, g, _as_complex(z).reshape(1), dt)[0])


@dataclass(frozen=True, eq=False)
class STFTGrid:
    """V_g f at cell midpoints of the square [-trunc, trunc]^2 (values[i, k] at x[i] + i xi[k])."""

    x: np.ndarray
    xi: np.ndarray
    values: np.ndarray
    step: float
    window: WindowSpec

    @property
    def trunc(self) -> float:
        return float(self.x[-1] + self.step / 2)

    def mask(self, region: Region | None) -> np.ndarray | None:
        if region is None:
            return None
        X, Y = np.meshgrid(self.x, self.xi, indexing="ij")
        return np.broadcast_to(region.contains(X, Y), X.shape)

    def with_values(self, values: np.ndarray) -> "STFTGrid":
        return STFTGrid(self.x, self.xi, values, self.step, self.window)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "xi", "re", "im"])
            for i, xv in enumerate(self.x):
                for k, yv in enumerate(self.xi):
                    v = self.values[i, k]
                    wr.writerow([repr(float(xv)), repr(float(yv)), repr(float(v.real)), repr(float(v.imag))])


def grid_axis(trunc: float, step: float) -> np.ndarray:
    m = int(round(2 * trunc / step))
    if m < 1 or abs(m * step - 2 * trunc) > 1e-9 * trunc:
        raise DomainError("2*trunc must be a multiple of step")
    return -trunc + (np.arange(m) + 0.5) * step


def _grid_transform(fvals: np.ndarray, x, xi, s, wg) -> np.ndarray:
    """sum_j wg_j f(x_i + s_j) e^{-2 pi i xi_k (x_i + s_j)} for stacked f-values (..., Nx, Nj)."""
    E = np.exp(-2j * np.pi * np.outer(s, xi))  # (Nj, Nxi)
    core = (fvals * wg) @ E
    return core * np.exp(-2j * np.pi * np.outer(x, xi))


def stft_grid(f: Signal, g: WindowSpec, trunc: float = 6.0, step: float = 1.0 / 32,
              dt: float = DEFAULT_DT) -> STFTGrid:
    x = grid_axis(trunc, step)
    s, w, gs = window_rule(g, dt)
    fv = f(x[:, None] + s[None, :])
    return STFTGrid(x, x.copy(), _grid_transform(fv, x, x, s, w * gs), step, g)


@lru_cache(maxsize=16)
def _basis_cached(K: int, gkey: str, trunc: float, step: float, dt: float):
    g = WindowSpec.from_dict(json.loads(gkey))
    x = grid_axis(trunc, step)
    s, w, gs = window_rule(g, dt)
    tab = hermite_table(K - 1, x[:, None] + s[None, :])
    vals = _grid_transform(tab, x, x, s, w * gs)
    vals.setflags(write=False)
    return x, vals


def stft_basis_grids(K: int, g: WindowSpec, trunc: float = 6.0, step: float = 1.0 / 32,
                     dt: float = DEFAULT_DT) -> tuple[np.ndarray, np.ndarray]:
    """Grids V_g h_k for k < K, shape (K, N, N); cached per window description."""
    return _basis_cached(K, json.dumps(g.to_dict(), sort_keys=True), trunc, step, dt)


def expansion_grid(f: Signal, g: WindowSpec, trunc: float = 6.0, step: float = 1.0 / 32,
                   dt: float = DEFAULT_DT) -> STFTGrid:
    """Same as :func:`stft_grid` for expansions, by linearity over cached basis grids."""
    K = f.coefficients.size
    x, basis = stft_basis_grids(K, g, trunc, step, dt)
    return STFTGrid(x, x.copy(), np.tensordot(f.coefficients, basis, axes=(0, 0)), step, g)


def lp_norm(grid: STFTGrid, p: float, region: Region | None = None) -> float:
    """(sum over grid cells inside region of |V|^p step^2)^{1/p}; region None means all of C."""
    if not (1 <= p < math.inf):
        raise DomainError(f"p must satisfy 1 <= p < inf, got {p}")
    a = np.abs(grid.values) ** p
    m = grid.mask(region)
    total = float(np.sum(a if m is None else a[m])) * grid.step**2
    return total ** (1.0 / p)


def reproducing_kernel(n: int, z, w, dt: float = DEFAULT_DT) -> np.ndarray | complex:
    """<pi(w) h_n, pi(z) h_n> by quadrature; ``w`` may be an array."""
    n = check_hermite_index(n)
    z = complex(_as_complex(z).ravel()[0])
    w_arr = _as_complex(w)
    shape = w_arr.shape
    wf = w_arr.ravel()
    s, wt = _rule_cached(("hermite", n, dt))
    hs = hermite_table(n, s)[n]
    t = z.real + s
    out = np.empty(wf.size, dtype=complex)
    chunk = max(1, 2_000_000 // s.size)
    for a in range(0, wf.size, chunk):
        ww = wf[a : a + chunk]
        hv = hermite_table(n, t[None, :] - ww.real[:, None])[n]
        ph = np.exp(2j * np.pi * (ww.imag[:, None] - z.imag) * t[None, :])
        out[a : a + chunk] = np.sum(wt * hs * hv * ph, axis=1)
    out = out.reshape(shape)
    return complex(out) if np.ndim(w) == 0 and not isinstance(w, np.ndarray) else out


def reproducing_kernel_closed(n: int, z, w) -> np.ndarray:
    """Closed form e^{2 pi i (eta - xi) x} V_{h_n}h_n(u - x, xi - eta), w = u + i eta.

    V_{h_n}h_n(a + ib) = e^{-pi i a b} L_n(pi (a^2 + b^2)) e^{-pi (a^2 + b^2) / 2}.
    """
    n = check_hermite_index(n)
    z = complex(np.asarray(z).ravel()[0]) if not isinstance(z, PhasePoint) else z.z
    w = _as_complex(w)
    a = w.real - z.real
    b = z.imag - w.imag
    r2 = a * a + b * b
    core = np.exp(-1j * np.pi * a * b) * laguerre_eval(n, np.pi * r2) * np.exp(-np.pi * r2 / 2)
    return np.exp(2j * np.pi * (w.imag - z.imag) * z.real) * core


def local_repr_residual(f: Signal, n: int, R: float, z, n_radial: int = 64,
                        n_angular: int = 128, kernel: str = "quadrature",
                        dt: float = DEFAULT_DT) -> float:
    """|V f(z) - nu_n(R)^{-1} int_{D(z,R)} V f(w) <pi(w)h_n, pi(z)h_n> dw| with Hermite window h_n."""
    if R <= 0:
        raise DomainError("R must be positive")
    z = complex(_as_complex(z).ravel()[0])
    g = WindowSpec.hermite(n)
    u, wr = leggauss(n_radial)
    r = R / 2 * (u + 1)
    wr = R / 2 * wr
    th = 2 * np.pi * np.arange(n_angular) / n_angular
    w = z + r[:, None] * np.exp(1j * th)[None, :]
    vf = stft_points(f, g, w, dt)
    if kernel == "quadrature":
        kv = reproducing_kernel(n, z, w, dt)
    elif kernel == "closed":
        kv = reproducing_kernel_closed(n, z, w)
    else:
        raise DomainError(f"unknown kernel mode {kernel!r}")
    integral = np.sum((wr * r)[:, None] * vf * kv) * (2 * np.pi / n_angular)
    return float(abs(stft_eval(f, g, z, dt) - integral / nu(n, R)))
