"""The rotation potentials J and J_beta, their stationary points and branches.

J_beta is the drive-dependent potential of the elastic regime; J is its
beta = 0 member. Both are 2*pi periodic, and their stationary points come in
alternating minima/maxima. Newton iteration runs on the unwrapped real line;
angles are reduced to [0, 2*pi) only when a StationaryPoint is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import MaterialParams

TWO_PI = 2.0 * math.pi
DEDUP_RADIUS = 1e-6
BRANCHES = ("m1", "m2", "M1", "M2")


class NewtonError(RuntimeError):
    """Newton iteration failed; ``last`` holds the final iterate."""

    def __init__(self, msg, last):
        super().__init__(msg)
        self.last = last


def wrap(alpha):
    """Reduce an angle (or array of angles) to [0, 2*pi)."""
    out = np.mod(alpha, TWO_PI)
    out = np.where(out >= TWO_PI, out - TWO_PI, out)
    return float(out) if np.ndim(out) == 0 else out


def angular_distance(a, b):
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi)
    return float(d) if np.ndim(d) == 0 else d


# -- J ----------------------------------------------------------------------

def j_value(p: MaterialParams, alpha):
    return -p.a * np.cos(alpha) + 0.5 * p.c * np.sin(alpha) ** 2


def j_deriv(p: MaterialParams, alpha):
    return (p.a + p.c * np.cos(alpha)) * np.sin(alpha)


def j_second(p: MaterialParams, alpha):
    return p.a * np.cos(alpha) + p.c * np.cos(2.0 * alpha)


# -- J_beta -----------------------------------------------------------------

def jbeta_value(p: MaterialParams, beta: float, alpha):
    s, c = np.sin(alpha), np.cos(alpha)
    return (-(p.a - 0.5 * beta * p.c * s) * c
            + 0.5 * beta * p.a * s
            + 0.5 * p.c * (1.0 - 0.25 * beta * beta) * s * s)


def jbeta_deriv(p: MaterialParams, beta: float, alpha):
    s, c = np.sin(alpha), np.cos(alpha)
    return ((p.a + p.c * (1.0 - 0.25 * beta * beta) * c) * s
            + 0.5 * beta * (p.a * c + p.c * (c * c - s * s)))


def jbeta_second(p: MaterialParams, beta: float, alpha):
    s, c = np.sin(alpha), np.cos(alpha)
    return (p.a * c + p.c * (1.0 - 0.25 * beta * beta) * (c * c - s * s)
            - 0.5 * beta * (p.a * s + 4.0 * p.c * s * c))


def jbeta_second_bound(p: MaterialParams, beta: float) -> float:
    """Upper bound of |J_beta''| over all angles (triangle inequality)."""
    return (p.a + abs(p.c) * abs(1.0 - 0.25 * beta * beta)
            + 0.5 * abs(beta) * (p.a + 2.0 * abs(p.c)))


def newton_tol(p: MaterialParams) -> float:
    return 1e-12 * max(1.0, p.scale)


def class_tol(p: MaterialParams) -> float:
    return 1e-8 * p.scale


# -- stationary points ------------------------------------------------------

@dataclass(frozen=True)
class StationaryPoint:
    alpha: float
    kind: str
    value: float
    second_deriv: float


def classify(p: MaterialParams, second: float) -> str:
    tol = class_tol(p)
    if second > tol:
        return "minimum"
    if second < -tol:
        return "maximum"
    return "degenerate"


def _newton(p, beta, alpha0, max_iter):
    """Plain Newton on J_beta'; returns the unwrapped root."""
    tol = newton_tol(p)
    a = float(alpha0)
    for _ in range(max_iter + 1):
        d = float(jbeta_deriv(p, beta, a))
        if abs(d) <= tol:
            return a
        dd = float(jbeta_second(p, beta, a))
        if dd == 0.0:
            raise NewtonError(f"zero second derivative at alpha={a!r}", a)
        a = a - d / dd
        if not (-TWO_PI <= a < 2.0 * TWO_PI):
            raise NewtonError(f"Newton left [-2pi, 4pi): alpha={a!r}", a)
    raise NewtonError(
        f"no convergence after {max_iter} iterations (|J'|={abs(d):.3e})", a)


def _point(p, beta, a):
    second = float(jbeta_second(p, beta, a))
    return StationaryPoint(alpha=wrap(a), kind=classify(p, second),
                           value=float(jbeta_value(p, beta, a)), second_deriv=second)


def find_stationary(p: MaterialParams, beta: float, alpha0: float,
                    max_iter: int = 50) -> StationaryPoint:
    """Newton iteration on J_beta' started from ``alpha0``.

    Raises NewtonError (carrying the last iterate) when the iteration does not
    reach |J_beta'| <= 1e-12 * max(1, lambda+mu+mu_c) within ``max_iter`` steps
    or leaves [-2*pi, 4*pi).
    """
    return _point(p, beta, _newton(p, beta, alpha0, max_iter))


def list_extrema(p: MaterialParams, beta: float = 0.0, n_seeds: int = 64,
                 max_iter: int = 50) -> list:
    """All distinct stationary points of J_beta on [0, 2*pi), sorted by angle."""
    if n_seeds < 8:
        raise ValueError("list_extrema needs n_seeds >= 8")
    found = []
    for k in range(n_seeds):
        try:
            pt = find_stationary(p, beta, TWO_PI * k / n_seeds, max_iter)
        except NewtonError:
            continue
        if all(angular_distance(pt.alpha, q.alpha) > DEDUP_RADIUS for q in found):
            found.append(pt)
    if not found:
        raise RuntimeError("no stationary point found; J_beta is periodic so this is a bug")
    return _merge_clusters(p, beta, sorted(found, key=lambda q: q.alpha))


def _merge_clusters(p, beta, pts, radius=1e-3):
    """Collapse neighbouring points of equal (or degenerate) kind.

    Extrema of a periodic function alternate, so two adjacent minima (or
    maxima) closer than ``radius`` are one flat stationary point that Newton
    resolved several times. The representative with the smallest |J'| stays.
    """
    def same(a, b):
        kinds_match = a.kind == b.kind or "degenerate" in (a.kind, b.kind)
        return kinds_match and angular_distance(a.alpha, b.alpha) < radius

    out = []
    for q in pts:
        if out and same(out[-1], q):
            if abs(jbeta_deriv(p, beta, q.alpha)) < abs(jbeta_deriv(p, beta, out[-1].alpha)):
                out[-1] = q
            continue
        out.append(q)
    if len(out) > 1 and same(out[0], out[-1]):
        out.pop()
    return out


def minima(points) -> list:
    return [q for q in points if q.kind == "minimum"]


def maxima(points) -> list:
    return [q for q in points if q.kind == "maximum"]


def brute_force_extrema(p: MaterialParams, beta: float = 0.0, n: int = 100_000):
    """Sign-change scan of J_beta' on an n-point grid of [0, 2*pi).

    Returns (minima, maxima) as arrays of linearly interpolated roots. Used as an independent oracle for the Newton results.
    """
    x = TWO_PI * np.arange(n) / n
    d = jbeta_deriv(p, beta, x)
    h = TWO_PI / n
    d1 = np.roll(d, -1)
    hit = (d == 0.0) | (d * d1 < 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.where(d == 0.0, x, x - d * h / (d1 - d))
    root = wrap(root[hit])
    rising = (d1 > d)[hit]
    return np.sort(root[rising]), np.sort(root[~rising])


# -- branch tracing ---------------------------------------------------------

@dataclass
class BifurcationTrace:
    """Extremum branches of J_beta over a beta grid.

    Branch values are a continuous lift of the angle (m1 starts in [-pi, pi));
    NaN marks an absent point.
    """

    betas: np.ndarray
    branches: dict = field(default_factory=dict)

    def at(self, beta: float, name: str, atol: float = 1e-12) -> float:
        idx = np.flatnonzero(np.abs(self.betas - beta) <= atol)
        if idx.size == 0:
            raise KeyError(f"beta={beta!r} is not on the trace grid")
        v = float(self.branches[name][idx[0]])
        if math.isnan(v):
            raise KeyError(f"branch {name} is absent at beta={beta!r}")
        return v

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("beta,m1,m2,M1,M2\n")
            for i, b in enumerate(self.betas):
                cells = [repr(float(b))]
                for name in BRANCHES:
                    v = self.branches[name][i]
                    cells.append("" if math.isnan(v) else repr(float(v)))
                fh.write(",".join(cells) + "\n")

    @classmethod
    def from_csv(cls, path) -> "BifurcationTrace":
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "beta,m1,m2,M1,M2":
                raise ValueError(f"{path}: unexpected header {header!r}")
            rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
        cols = list(zip(*rows))
        conv = lambda col: np.array([float(c) if c else math.nan for c in col])
        return cls(conv(cols[0]), {n: conv(cols[k + 1]) for k, n in enumerate(BRANCHES)})


def _initial_labels(p, beta):
    """Name the stationary points at the first grid point.

    m1 is the deepest minimum, lifted into [-pi, pi); M1, m2, M2 follow it in
    increasing angle within one period.
    """
    pts = list_extrema(p, beta)
    mins = minima(pts)
    labels = dict.fromkeys(BRANCHES, math.nan)
    if not mins:
        return labels
    m1 = min(mins, key=lambda q: q.value).alpha
    if m1 >= math.pi:
        m1 -= TWO_PI
    ahead = sorted(((q.alpha - m1) % TWO_PI, q.kind) for q in pts
                   if angular_distance(q.alpha, m1) > DEDUP_RADIUS)
    names = iter(("M1", "m2", "M2"))
    want = {"M1": "maximum", "m2": "minimum", "M2": "maximum"}
    labels["m1"] = m1
    for offset, kind in ahead:
        name = next(names, None)
        if name is None or kind != want[name]:
            break
        labels[name] = m1 + offset
    return labels


def trace_extrema(p: MaterialParams, beta_grid, max_jump: float = 0.5,
                  max_iter: int = 50) -> BifurcationTrace:
    """Follow m1, m2 (minima) and M1, M2 (maxima) of J_beta along ``beta_grid``.

    Each point is seeded by Newton from the previous grid point's value; a
    branch is marked absent when Newton fails, the point changes type, or it
    jumps by more than ``max_jump`` radians.
    """
    betas = np.asarray(beta_grid, dtype=float)
    out = {n: np.full(betas.size, math.nan) for n in BRANCHES}
    if betas.size == 0:
        return BifurcationTrace(betas, out)
    last = _initial_labels(p, float(betas[0]))
    for n in BRANCHES:
        out[n][0] = last[n]
    for i in range(1, betas.size):
        b = float(betas[i])
        for n in BRANCHES:
            seed = last[n]
            if math.isnan(seed):
                continue
            try:
                a = _newton(p, b, seed, max_iter)
            except NewtonError:
                continue
            kind = classify(p, float(jbeta_second(p, b, a)))
            if kind != ("minimum" if n.startswith("m") else "maximum"):
                continue
            if abs(a - seed) > max_jump:
                continue
            out[n][i] = a
            last[n] = a
    return BifurcationTrace(betas, out)
