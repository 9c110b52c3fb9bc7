"""Uniform node-based 2D grids, scalar fields and Dirichlet boundary data.

Values are stored as ``(ny, nx)`` arrays: row ``j`` is the y index, column
``i`` the x index, and node ``(i, j)`` sits at ``(i*hx, j*hy)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import kernels

SIDES = ("left", "right", "bottom", "top")


class GridMismatchError(ValueError):
    pass


class BoundaryError(ValueError):
    pass


class FieldFormatError(ValueError):
    """Parse failure in a field file; carries ``line`` and ``column`` (1-based)."""

    def __init__(self, msg, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            msg = f"{where}: {msg}"
        super().__init__(msg)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3 nodes per axis, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("grid edge lengths must be positive")

    @property
    def hx(self) -> float:
        return self.lx / (self.nx - 1)

    @property
    def hy(self) -> float:
        return self.ly / (self.ny - 1)

    @property
    def shape(self) -> tuple:
        return (self.ny, self.nx)

    def coords(self):
        """Meshgrid ``(X, Y)`` of node coordinates, each of shape ``(ny, nx)``."""
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return np.meshgrid(x, y)

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = True
        m[:, 0] = m[:, -1] = True
        return m


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise GridMismatchError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid2D) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid2D, fn) -> "ScalarField":
        X, Y = grid.coords()
        return cls(grid, np.broadcast_to(fn(X, Y), grid.shape).astype(float))

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def __eq__(self, other):
        return (isinstance(other, ScalarField) and self.grid == other.grid
                and np.array_equal(self.values, other.values))


def check_same_grid(a: ScalarField, b: ScalarField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


# -- boundary data ----------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    side: str
    t0: float
    t1: float
    value: float

    @property
    def length(self) -> float:
        return self.t1 - self.t0


@dataclass(frozen=True)
class BoundarySpec:
    """Piecewise-constant Dirichlet data, ``t`` normalised arc position per side.

    Left/right sides are parametrised by y/ly, bottom/top by x/lx. A node on a
    shared segment end belongs to the segment starting there.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        for s in segs:
            if s.side not in SIDES:
                raise BoundaryError(f"unknown side {s.side!r}")
            if not (0.0 <= s.t0 < s.t1 <= 1.0):
                raise BoundaryError(f"segment on {s.side} needs 0 <= t0 < t1 <= 1, got [{s.t0}, {s.t1}]")
            if not math.isfinite(s.value):
                raise BoundaryError(f"segment value on {s.side} must be finite")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, value: float) -> "BoundarySpec":
        return cls(tuple(Segment(s, 0.0, 1.0, float(value)) for s in SIDES))

    @classmethod
    def sides(cls, left, right, bottom, top) -> "BoundarySpec":
        vals = dict(left=left, right=right, bottom=bottom, top=top)
        return cls(tuple(Segment(s, 0.0, 1.0, float(vals[s])) for s in SIDES))

    def on_side(self, side: str) -> list:
        return sorted((s for s in self.segments if s.side == side), key=lambda s: s.t0)

    def validate_cover(self) -> None:
        """Raise BoundaryError unless every side is tiled without gaps or overlaps."""
        if not self.segments:
            raise BoundaryError("boundary spec has no segments")
        for side in SIDES:
            segs = self.on_side(side)
            if not segs:
                raise BoundaryError(f"side {side} is not covered")
            if segs[0].t0 != 0.0 or segs[-1].t1 != 1.0:
                raise BoundaryError(f"side {side} is not covered on all of [0, 1]")
            for a, b in zip(segs, segs[1:]):
                if b.t0 > a.t1:
                    raise BoundaryError(f"gap on side {side} between t={a.t1} and t={b.t0}")
                if b.t0 < a.t1:
                    raise BoundaryError(f"overlap on side {side} between t={b.t0} and t={a.t1}")

    def side_values(self, side: str, n: int) -> np.ndarray:
        segs = self.on_side(side)
        t = np.arange(n) / (n - 1)
        out = np.full(n, np.nan)
        for k, s in enumerate(segs):
            last = k == len(segs) - 1
            sel = (t >= s.t0) & ((t <= s.t1) if last else (t < s.t1))
            out[sel] = s.value
        if np.isnan(out).any():
            raise BoundaryError(f"uncovered boundary node on side {side}")
        return out


def apply_dirichlet(f: ScalarField, bc: BoundarySpec) -> ScalarField:
    """Copy of ``f`` with boundary nodes set from ``bc``.

    Corners belong to the first side in the order left, right, bottom, top.
    """
    bc.validate_cover()
    g = f.grid
    v = f.values.copy()
    v[-1, 1:-1] = bc.side_values("top", g.nx)[1:-1]
    v[0, 1:-1] = bc.side_values("bottom", g.nx)[1:-1]
    v[:, -1] = bc.side_values("right", g.ny)
    v[:, 0] = bc.side_values("left", g.ny)
    return f.with_values(v)


def boundary_field(grid: Grid2D, bc: BoundarySpec, interior: float = 0.0) -> ScalarField:
    return apply_dirichlet(ScalarField(grid, np.full(grid.shape, float(interior))), bc)


# -- operators --------------------------------------------------------------

def laplacian5(f: ScalarField) -> ScalarField:
    """Five-point Laplacian at interior nodes; zero on the boundary."""
    out = np.zeros_like(f.values)
    kernels.laplacian5(f.values, out, f.grid.hx, f.grid.hy)
    return f.with_values(out)


def grad_sq(f: ScalarField) -> ScalarField:
    """|grad f|^2 per node: central differences inside, one-sided at the edges."""
    gy, gx = np.gradient(f.values, f.grid.hy, f.grid.hx, edge_order=1)
    return f.with_values(gx * gx + gy * gy)


def linf_diff(a: ScalarField, b: ScalarField) -> float:
    check_same_grid(a, b)
    return float(np.max(np.abs(a.values - b.values)))


# -- file I/O ---------------------------------------------------------------

_HEADER = re.compile(r"^#\s*nx=(\S+)\s+ny=(\S+)\s+lx=(\S+)\s+ly=(\S+)\s*$")


def write_csv(f: ScalarField, path) -> None:
    """Self-describing CSV; 17 significant digits make the round trip exact."""
    g = f.grid
    with open(path, "w") as fh:
        fh.write(f"# nx={g.nx} ny={g.ny} lx={g.lx!r} ly={g.ly!r}\n")
        for row in f.values:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_csv(path) -> ScalarField:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FieldFormatError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise FieldFormatError("empty file", line=1)
    m = _HEADER.match(lines[0])
    if m is None:
        raise FieldFormatError("expected header '# nx=<int> ny=<int> lx=<float> ly=<float>'", line=1)
    try:
        nx, ny = int(m.group(1)), int(m.group(2))
        lx, ly = float(m.group(3)), float(m.group(4))
        grid = Grid2D(nx, ny, lx, ly)
    except ValueError as exc:
        raise FieldFormatError(f"bad grid metadata: {exc}", line=1) from None
    data = [ln for ln in lines[1:]]
    while data and not data[-1].strip():
        data.pop()
    if len(data) != ny:
        raise FieldFormatError(f"expected {ny} data rows, found {len(data)}", line=len(data) + 2)
    values = np.empty((ny, nx))
    for j, ln in enumerate(data):
        cells = ln.split(",")
        if len(cells) != nx:
            raise FieldFormatError(f"row {j} has {len(cells)} values, expected {nx}", line=j + 2)
        for i, c in enumerate(cells):
            try:
                values[j, i] = float(c)
            except ValueError:
                raise FieldFormatError(f"cannot parse {c!r} as a float", line=j + 2, column=i + 1) from None
    return ScalarField(grid, values)


def pgm_levels(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    s = np.clip((values - lo) / (hi - lo), 0.0, 1.0)
    return np.floor(255.0 * s + 0.5).astype(int)


def write_pgm_levels(levels: np.ndarray, path) -> None:
    ny, nx = levels.shape
    with open(path, "w") as fh:
        fh.write(f"P2\n{nx} {ny}\n255\n")
        for row in levels[::-1]:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def write_pgm(f: ScalarField, path, lo: float, hi: float) -> None:
    """Plain (P2) greyscale image; y increases upwards in the picture."""
    if not lo < hi:
        raise ValueError("write_pgm needs lo < hi")
    write_pgm_levels(pgm_levels(f.values, lo, hi), path)
