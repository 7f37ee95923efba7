"""Planar regions, rasterisation, (gamma, R)-density and point-set statistics.

Regions are immutable expression trees.  Membership is evaluated pointwise
on numpy arrays; areas are obtained by midpoint counting.  Periodic regions
declare their period as ``(px, py)`` where ``0.0`` means invariance under
every translation along that axis and ``None`` means aperiodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from tfsamp.errors import CapabilityError, DomainError

Period = tuple  # (px | None, py | None)


class Region:
    period: Period = (None, None)

    def contains(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def to_expr(self) -> str:
        raise NotImplementedError

    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Intersect((self, other))

    def __invert__(self):
        return Complement(self)

    def __str__(self):
        return self.to_expr()


def _fmt(v: float) -> str:
    return repr(float(v))


@dataclass(frozen=True)
class Everything(Region):
    period = (0.0, 0.0)

    def contains(self, x, y):
        return np.ones(np.broadcast(x, y).shape, dtype=bool)

    def to_expr(self):
        return "(all)"


@dataclass(frozen=True)
class Nothing(Region):
    period = (0.0, 0.0)

    def contains(self, x, y):
        return np.zeros(np.broadcast(x, y).shape, dtype=bool)

    def to_expr(self):
        return "(empty)"


ALL = Everything()
EMPTY = Nothing()


@dataclass(frozen=True)
class Disc(Region):
    cx: float
    cy: float
    r: float

    def contains(self, x, y):
        return (np.asarray(x) - self.cx) ** 2 + (np.asarray(y) - self.cy) ** 2 <= self.r**2

    def to_expr(self):
        return f"(disc {_fmt(self.cx)} {_fmt(self.cy)} {_fmt(self.r)})"


@dataclass(frozen=True)
class Rect(Region):
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def to_expr(self):
        return f"(rect {_fmt(self.x0)} {_fmt(self.y0)} {_fmt(self.x1)} {_fmt(self.y1)})"


@dataclass(frozen=True)
class HalfPlane(Region):
    """Points with a*x + b*y >= c."""

    a: float
    b: float
    c: float

    def contains(self, x, y):
        return self.a * np.asarray(x) + self.b * np.asarray(y) >= self.c

    def to_expr(self):
        return f"(halfplane {_fmt(self.a)} {_fmt(self.b)} {_fmt(self.c)})"


def monomials(count: int) -> list[tuple[int, int]]:
    """Exponent pairs (a, b) of z^a conj(z)^b in graded lex order."""
    out = []
    d = 0
    while len(out) < count:
        for a in range(d, -1, -1):
            out.append((a, d - a))
        d += 1
    return out[:count]


def eval_zzbar_poly(coeffs, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    total = np.zeros_like(z)
    for c, (a, b) in zip(coeffs, monomials(len(coeffs))):
        if c != 0:
            total = total + c * z**a * zc**b
    return total


@dataclass(frozen=True)
class LevelSet(Region):
    """Points where |p(z, conj z)| >= eps; coefficients in graded lex order."""

    coeffs: tuple
    eps: float

    def contains(self, x, y):
        z = np.asarray(x) + 1j * np.asarray(y)
        return np.abs(eval_zzbar_poly(self.coeffs, z)) >= self.eps

    def to_expr(self):
        cs = " ".join(_fmt_complex(c) for c in self.coeffs)
        return f'(levelset "{cs}" {_fmt(self.eps)})'


def _fmt_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c).strip("()")


@dataclass(frozen=True)
class Strips(Region):
    """Vertical strips {x : (x - offset) mod period < width}."""

    width: float
    period_x: float
    offset: float = 0.0

    def __post_init__(self):
        if not (0 < self.width <= self.period_x):
            raise DomainError("strips need 0 < width <= period")

    @property
    def period(self):
        return (self.period_x, 0.0)

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        inside = np.mod(x - self.offset, self.period_x) < self.width
        return np.broadcast_to(inside, np.broadcast(x, y).shape)

    def to_expr(self):
        extra = f" {_fmt(self.offset)}" if self.offset else ""
        return f"(strips {_fmt(self.width)} {_fmt(self.period_x)}{extra})"


@dataclass(frozen=True)
class Cells(Region):
    """Closed squares of side ``side`` centred on the lattice period*(Z + iZ)."""

    side: float
    spacing: float

    def __post_init__(self):
        if not (0 < self.side <= self.spacing):
            raise DomainError("cells need 0 < side <= period")

    @property
    def period(self):
        return (self.spacing, self.spacing)

    def contains(self, x, y):
        h = self.spacing
        dx = np.abs(np.mod(np.asarray(x, dtype=float) + h / 2, h) - h / 2)
        dy = np.abs(np.mod(np.asarray(y, dtype=float) + h / 2, h) - h / 2)
        return (dx <= self.side / 2) & (dy <= self.side / 2)

    def to_expr(self):
        return f"(cells {_fmt(self.side)} {_fmt(self.spacing)})"


def _combine_axis(a, b):
    if a is None or b is None:
        return None
    if a == 0.0:
        return b
    if b == 0.0:
        return a
    lo, hi = sorted((a, b))
    k = hi / lo
    if abs(k - round(k)) < 1e-9:
        return hi
    return None


def _combine_periods(parts) -> Period:
    px, py = parts[0].period
    for p in parts[1:]:
        px = _combine_axis(px, p.period[0])
        py = _combine_axis(py, p.period[1])
    return (px, py)


@dataclass(frozen=True)
class Union(Region):
    parts: tuple

    @property
    def period(self):
        return _combine_periods(self.parts)

    def contains(self, x, y):
        out = self.parts[0].contains(x, y)
        for p in self.parts[1:]:
            out = out | p.contains(x, y)
        return out

    def to_expr(self):
        return "(union " + " ".join(p.to_expr() for p in self.parts) + ")"


@dataclass(frozen=True)
class Intersect(Region):
    parts: tuple

    @property
    def period(self):
        return _combine_periods(self.parts)

    def contains(self, x, y):
        out = self.parts[0].contains(x, y)
        for p in self.parts[1:]:
            out = out & p.contains(x, y)
        return out

    def to_expr(self):
        return "(intersect " + " ".join(p.to_expr() for p in self.parts) + ")"


@dataclass(frozen=True)
class Complement(Region):
    inner: Region

    @property
    def period(self):
        return self.inner.period

    def contains(self, x, y):
        return ~self.inner.contains(x, y)

    def to_expr(self):
        return f"(complement {self.inner.to_expr()})"


# --------------------------------------------------------------------------
# expression parser


class RegionSyntaxError(DomainError):
    def __init__(self, message: str, pos: int, text: str):
        super().__init__(f"{message} at position {pos}: {text[:pos]}<<HERE>>{text[pos:]}")
        self.pos = pos


def _tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, ch, i
            i += 1
        elif ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise RegionSyntaxError("unterminated string", i, text)
            yield "str", text[i + 1 : j], i
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()"':
                j += 1
            yield "atom", text[i:j], i
            i = j


_ARITY = {
    "all": 0, "empty": 0, "disc": 3, "rect": 4, "halfplane": 3,
    "strips": (2, 3), "cells": 2,
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = list(_tokenize(text))
        self.i = 0

    def peek(self):
        if self.i >= len(self.toks):
            return ("eof", "", len(self.text))
        return self.toks[self.i]

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise RegionSyntaxError(f"expected {kind!r}, found {tok[1] or tok[0]!r}", tok[2], self.text)
        return tok

    def number(self):
        tok = self.take()
        if tok[0] != "atom":
            raise RegionSyntaxError("expected a number", tok[2], self.text)
        try:
            return float(tok[1])
        except ValueError:
            raise RegionSyntaxError(f"invalid number {tok[1]!r}", tok[2], self.text) from None

    def region(self) -> Region:
        self.expect("(")
        head = self.take()
        if head[0] != "atom":
            raise RegionSyntaxError("expected a region name", head[2], self.text)
        name = head[1]
        if name in ("union", "intersect"):
            parts = []
            while self.peek()[0] == "(":
                parts.append(self.region())
            if not parts:
                raise RegionSyntaxError(f"{name} needs at least one operand", self.peek()[2], self.text)
            self.expect(")")
            return parts[0] if len(parts) == 1 else (Union if name == "union" else Intersect)(tuple(parts))
        if name == "complement":
            inner = self.region()
            self.expect(")")
            return Complement(inner)
        if name == "levelset":
            tok = self.take()
            if tok[0] != "str":
                raise RegionSyntaxError("levelset expects a quoted coefficient list", tok[2], self.text)
            try:
                coeffs = tuple(complex(c.replace("i", "j")) for c in tok[1].split())
            except ValueError:
                raise RegionSyntaxError("invalid coefficient", tok[2], self.text) from None
            if not coeffs:
                raise RegionSyntaxError("empty coefficient list", tok[2], self.text)
            eps = self.number()
            self.expect(")")
            return LevelSet(tuple(c.real if c.imag == 0 else c for c in coeffs), eps)
        if name not in _ARITY:
            raise RegionSyntaxError(f"unknown region {name!r}", head[2], self.text)
        args = []
        while self.peek()[0] == "atom":
            args.append(self.number())
        arity = _ARITY[name]
        allowed = arity if isinstance(arity, tuple) else (arity,)
        if len(args) not in allowed:
            raise RegionSyntaxError(f"{name} takes {arity} arguments, got {len(args)}",
                                    self.peek()[2], self.text)
        self.expect(")")
        try:
            return {
                "all": lambda: ALL, "empty": lambda: EMPTY,
                "disc": lambda: Disc(*args), "rect": lambda: Rect(*args),
                "halfplane": lambda: HalfPlane(*args), "strips": lambda: Strips(*args),
                "cells": lambda: Cells(*args),
            }[name]()
        except DomainError as exc:
            raise RegionSyntaxError(str(exc), head[2], self.text) from None


def parse_region(text: str) -> Region:
    """Parse the prefix region language, e.g. ``(union (disc 0 0 1) (strips 0.5 1))``."""
    p = _Parser(text)
    r = p.region()
    tok = p.peek()
    if tok[0] != "eof":
        raise RegionSyntaxError("trailing input", tok[2], text)
    return r


# --------------------------------------------------------------------------
# rasterisation and density


def _cell_offsets(mode: str, size: float, step: float):
    """Pixel-centre offsets of a cell (square side or disc radius ``size``)."""
    extent = size if mode == "square" else 2.0 * size
    m = max(2, int(round(extent / step)))
    u = (np.arange(m) + 0.5) * (extent / m) - extent / 2
    ox, oy = np.meshgrid(u, u, indexing="ij")
    if mode == "square":
        inside = np.ones((m, m), dtype=bool)
    elif mode == "disc":
        inside = ox**2 + oy**2 <= size**2
    else:
        raise DomainError(f"unknown cell mode {mode!r}")
    return ox, oy, inside, extent / m


def _boundary_pixels(member: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Count, per leading index, cell pixels whose membership differs from a neighbour."""
    diff = np.zeros(member.shape, dtype=bool)
    dx = member[:, 1:, :] != member[:, :-1, :]
    dy = member[:, :, 1:] != member[:, :, :-1]
    diff[:, 1:, :] |= dx
    diff[:, :-1, :] |= dx
    diff[:, :, 1:] |= dy
    diff[:, :, :-1] |= dy
    return np.sum(diff & inside, axis=(1, 2))


def _cell_fractions(region: Region, centers: np.ndarray, mode: str, size: float, step: float):
    ox, oy, inside, pix = _cell_offsets(mode, size, step)
    n_in = int(inside.sum())
    m2 = ox.size
    chunk = max(1, 4_000_000 // m2)
    frac = np.empty(len(centers))
    err = np.empty(len(centers))
    for s in range(0, len(centers), chunk):
        c = centers[s : s + chunk]
        member = region.contains(c.real[:, None, None] + ox, c.imag[:, None, None] + oy)
        member = np.broadcast_to(member, (len(c),) + ox.shape)
        count = np.sum(member & inside, axis=(1, 2))
        frac[s : s + chunk] = count / n_in
        # an edge pair of flagged pixels misassigns at most one pixel of area
        err[s : s + chunk] = 0.5 * _boundary_pixels(member, inside) / n_in
    return frac, err, pix


def region_area_in(region: Region, cell: tuple, step: float | None = None) -> tuple[float, float]:
    """Rasterised |region ∩ cell| and its error estimate.

    ``cell`` is ``("disc", cx, cy, r)`` or ``("square", cx, cy, side)``.
    """
    mode, cx, cy, size = cell
    step = step if step is not None else size / 64
    frac, err, _ = _cell_fractions(region, np.array([complex(cx, cy)]), mode, size, step)
    area = math.pi * size**2 if mode == "disc" else size**2
    return float(frac[0] * area), float(err[0] * area)


@dataclass(frozen=True)
class DensityQuery:
    R: float
    mode: str = "square"
    raster_step: float | None = None
    search_halfwidth: float | None = None

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError("R must be positive")
        if self.mode not in ("disc", "square"):
            raise DomainError("mode must be 'disc' or 'square'")
        if self.raster_step is not None and self.raster_step > self.R / 32:
            raise DomainError("raster step must be at most R/32")

    @property
    def step(self) -> float:
        return self.raster_step if self.raster_step is not None else self.R / 64


@dataclass(frozen=True)
class DensityResult:
    gamma: float  # scan minimum: an upper bound for the true infimum
    gamma_conservative: float  # gamma minus the raster error at the minimiser
    raster_error: float
    argmin: complex
    n_centers: int
    scan_step: float
    periodic: bool

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma, "gamma_conservative": self.gamma_conservative,
            "raster_error": self.raster_error, "argmin": [self.argmin.real, self.argmin.imag],
            "n_centers": self.n_centers, "scan_step": self.scan_step, "periodic": self.periodic,
        }


def _axis_scan(period, halfwidth, step):
    if period == 0.0:
        return np.array([0.0]), True
    if period is not None:
        s = min(step, period / 8)
        return np.arange(0.0, period - 1e-12, s), True
    if halfwidth is None:
        return None, False
    k = int(math.floor(halfwidth / step))
    return step * np.arange(-k, k + 1), False


def density_gamma(region: Region, q: DensityQuery) -> DensityResult:
    """Scan the infimum over cell centres of |region ∩ cell| / |cell|."""
    step = q.R / 8
    px, py = region.period
    xs, per_x = _axis_scan(px, q.search_halfwidth, step)
    ys, per_y = _axis_scan(py, q.search_halfwidth, step)
    if xs is None or ys is None:
        raise CapabilityError("aperiodic region needs a finite search window")
    cx, cy = np.meshgrid(xs, ys, indexing="ij")
    centers = (cx + 1j * cy).ravel()
    frac, err, _ = _cell_fractions(region, centers, q.mode, q.R, q.step)
    i = int(np.argmin(frac))
    g = float(frac[i])
    return DensityResult(
        gamma=g,
        gamma_conservative=max(0.0, g - float(err[i])),
        raster_error=float(err[i]),
        argmin=complex(centers[i]),
        n_centers=len(centers),
        scan_step=step,
        periodic=per_x and per_y,
    )


# --------------------------------------------------------------------------
# point sets


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite set of phase-space points; ``window`` is the half-width of the
    square [-window, window]^2 the points were generated in (if declared)."""

    points: np.ndarray
    window: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex).ravel())

    def __len__(self):
        return self.points.size


def lattice(spacing: float, halfwidth: float) -> PointSet:
    k = int(math.floor(halfwidth / spacing + 1e-9))
    u = spacing * np.arange(-k, k + 1)
    x, y = np.meshgrid(u, u, indexing="ij")
    return PointSet((x + 1j * y).ravel(), window=halfwidth)


def jittered_lattice(step: float, jitter: float, seed: int, x_half: float,
                     xi_half: float | None = None) -> PointSet:
    """Lattice step*(n + i m) inside [-x_half, x_half] x [-xi_half, xi_half],
    each coordinate perturbed uniformly in [-jitter, jitter]."""
    if not jitter < step / 2:
        raise DomainError("jitter must be smaller than half the lattice step")
    xi_half = x_half if xi_half is None else xi_half
    nx = int(math.floor(x_half / step + 1e-9))
    ny = int(math.floor(xi_half / step + 1e-9))
    x, y = np.meshgrid(step * np.arange(-nx, nx + 1), step * np.arange(-ny, ny + 1), indexing="ij")
    rng = np.random.default_rng(seed)
    jx = rng.uniform(-jitter, jitter, x.shape)
    jy = rng.uniform(-jitter, jitter, x.shape)
    return PointSet(((x + jx) + 1j * (y + jy)).ravel(), window=max(x_half, xi_half) + jitter)


def beurling_lower_density(pts: PointSet, R_max: float, scan_step: float | None = None) -> float:
    """min over anchors z of #(pts ∩ (z + Q_R)) / R^2 at R = R_max.

    Anchors are restricted so every square lies inside the declared window.
    Squares are half-open so lattice points on a shared edge count once.
    """
    if len(pts) == 0:
        return 0.0
    if pts.window is None:
        raise DomainError("point set must declare its generation window")
    if R_max <= 0 or R_max > 2 * pts.window / 4 + 1e-12:
        raise DomainError(f"R_max={R_max} too large for window half-width {pts.window}")
    step = scan_step if scan_step is not None else R_max / 16
    lim = pts.window - R_max / 2
    k = int(math.floor(lim / step + 1e-9))
    anchors = step * np.arange(-k, k + 1)
    x, y = pts.points.real, pts.points.imag
    h = R_max / 2
    best = math.inf
    for ax in anchors:
        colmask = (x >= ax - h) & (x < ax + h)
        ys = y[colmask]
        for ay in anchors:
            cnt = int(np.count_nonzero((ys >= ay - h) & (ys < ay + h)))
            best = min(best, cnt)
    return best / R_max**2


@dataclass(frozen=True)
class SeparationResult:
    min_gap: float
    uniformly_separated: bool


def separation_check(pts: PointSet) -> SeparationResult:
    if len(pts) < 2:
        return SeparationResult(math.inf, True)
    xy = np.column_stack([pts.points.real, pts.points.imag])
    d, _ = cKDTree(xy).query(xy, k=2)
    gap = float(np.min(d[:, 1]))
    return SeparationResult(gap, gap > 0)
