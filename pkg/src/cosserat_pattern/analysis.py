"""Diagnostics of stationary rotation fields.

Cell labelling and transition-layer widths, the boundary-data conditions
that guarantee layers (for the soft and the elastic case), and the pointwise
no-plastic-flow test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .field import BoundarySpec, ScalarField, pgm_levels, write_pgm_levels
from .params import MaterialParams
from .potential import TWO_PI, BifurcationTrace, angular_distance, brute_force_extrema, wrap

LAYER = -1


@dataclass
class PartitionReport:
    labels: np.ndarray            # well index per node, LAYER for layer nodes
    names: tuple                  # name of each well label
    cell_count: int
    layer_fraction: float
    widths: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {n: int(np.sum(self.labels == k)) for k, n in enumerate(self.names)}
        out["layer"] = int(np.sum(self.labels == LAYER))
        return out

    def to_text(self, extra: dict = None) -> str:
        lines = [f"cell_count: {self.cell_count}",
                 f"layer_fraction: {self.layer_fraction!r}"]
        for name, n in self.counts().items():
            lines.append(f"nodes_{name}: {n}")
        if self.widths:
            lines.append(f"layer_width_median: {float(np.median(self.widths))!r}")
            lines.append(f"layer_width_count: {len(self.widths)}")
        else:
            lines.append("layer_width_count: 0")
        for k, v in (extra or {}).items():
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"

    def write_pgm(self, path) -> None:
        """Label image: wells spread over 0..255, layer nodes at 128."""
        n = len(self.names)
        lv = np.full(self.labels.shape, 128, dtype=int)
        for k in range(n):
            lv[self.labels == k] = 0 if n == 1 else int(round(255 * k / (n - 1)))
        write_pgm_levels(lv, path)


def well_names(wells) -> tuple:
    names = []
    for w in wells:
        if abs(w) < 1e-9:
            names.append("well_0")
        elif abs(w - math.pi) < 1e-9:
            names.append("well_pi")
        else:
            names.append(f"well_{w:.4f}")
    return tuple(names)


def label_cells(f: ScalarField, wells, tol: float = 0.3, names=None,
                measure_widths: bool = True) -> PartitionReport:
    """Assign each node to the nearest well within ``tol`` (angular distance).

    Nodes farther than ``tol`` from every well are layer nodes. Cells are the
    4-connected components of each well label. With exactly two wells the
    10%-90% layer widths are measured as well.
    """
    wells = [float(w) for w in wells]
    if not wells:
        raise ValueError("label_cells needs at least one well")
    if not tol > 0:
        raise ValueError("tol must be positive")
    v = f.values
    dist = np.stack([angular_distance(v, w) for w in wells])
    nearest = np.argmin(dist, axis=0)
    labels = np.where(np.min(dist, axis=0) <= tol, nearest, LAYER)
    four = ndimage.generate_binary_structure(2, 1)
    cells = sum(ndimage.label(labels == k, structure=four)[1] for k in range(len(wells)))
    widths = []
    if measure_widths and len(wells) == 2:
        widths = measure_layer_width(f, (wells[0], wells[1]))
    return PartitionReport(labels=labels, names=tuple(names or well_names(wells)),
                           cell_count=int(cells),
                           layer_fraction=float(np.mean(labels == LAYER)), widths=widths)


def _profile_widths(s, x, lo, hi):
    """10-90 style crossing widths of one normalised profile ``s`` along ``x``."""
    widths = []
    state = None          # "L" below lo, "H" above hi
    x_lo = x_hi = None    # last crossing position of each level
    for k in range(len(s)):
        if k > 0:
            s0, s1 = s[k - 1], s[k]
            for level in (lo, hi):
                if (s0 - level) * (s1 - level) < 0 or (s1 == level and s0 != level):
                    xc = x[k - 1] + (level - s0) * (x[k] - x[k - 1]) / (s1 - s0)
                    if level == lo:
                        x_lo = xc
                    else:
                        x_hi = xc
        v = s[k]
        new = "L" if v <= lo else "H" if v >= hi else None
        if new is not None:
            if state is not None and new != state:
                widths.append(abs(x_hi - x_lo))
            state = new
    return widths


def measure_layer_width(f: ScalarField, wells, lo_frac: float = 0.1, hi_frac: float = 0.9,
                        skip_boundary: bool = True) -> list:
    """Widths of all layer crossings along grid rows and columns.

    A crossing is a passage of the normalised profile (f - w0)/(w1 - w0) from
    below ``lo_frac`` to above ``hi_frac`` (or back); its width is the distance
    between the two level crossings, located by linear interpolation.
    Boundary rows and columns hold Dirichlet data and are skipped by default.
    """
    w0, w1 = float(wells[0]), float(wells[1])
    if w0 == w1:
        raise ValueError("wells must differ")
    if not 0.0 < lo_frac < hi_frac < 1.0:
        raise ValueError("need 0 < lo_frac < hi_frac < 1")
    g = f.grid
    s = (f.values - w0) / (w1 - w0)
    x = np.arange(g.nx) * g.hx
    y = np.arange(g.ny) * g.hy
    k0 = 1 if skip_boundary else 0
    widths = []
    for j in range(k0, g.ny - k0):
        widths += _profile_widths(s[j, :], x, lo_frac, hi_frac)
    for i in range(k0, g.nx - k0):
        widths += _profile_widths(s[:, i], y, lo_frac, hi_frac)
    return widths


# -- boundary-data conditions ----------------------------------------------

def _pick_disjoint(segments, in1, in2) -> bool:
    """True iff some segment satisfies clause 1 and a *different* one clause 2."""
    c1 = [k for k, s in enumerate(segments) if s.length > 0 and in1(wrap(s.value))]
    c2 = [k for k, s in enumerate(segments) if s.length > 0 and in2(wrap(s.value))]
    return any(a != b for a in c1 for b in c2)


def check_tl1(bc: BoundarySpec) -> bool:
    """Sufficient boundary condition for transition layers in the soft case."""
    h = 0.5 * math.pi
    return _pick_disjoint(
        bc.segments,
        lambda v: 0.0 <= v < h or 3.0 * h < v < TWO_PI,
        lambda v: h < v < 3.0 * h)


def tl2_bounds(trace: BifurcationTrace) -> dict:
    try:
        return {"M1(-2)": wrap(trace.at(-2.0, "M1")), "M2(-2)": wrap(trace.at(-2.0, "M2")),
                "M1(2)": wrap(trace.at(2.0, "M1")), "M2(2)": wrap(trace.at(2.0, "M2"))}
    except KeyError as exc:
        raise ValueError(f"trace lacks the maxima needed at beta = -2, 2: {exc}") from None


def check_tl2(bc: BoundarySpec, trace: BifurcationTrace, p: MaterialParams = None,
              xcheck_tol: float = 1e-3) -> bool:
    """Sufficient boundary condition for layers under the shear drive -2 -> 2.

    The maxima M1, M2 at beta = -2 and 2 come from ``trace``; when ``p`` is
    given they are cross-checked against a brute-force scan of J_beta'.
    """
    m = tl2_bounds(trace)
    if p is not None:
        for b in (-2.0, 2.0):
            _, maxs = brute_force_extrema(p, b)
            for key in (f"M1({b:g})", f"M2({b:g})"):
                if np.min(angular_distance(maxs, m[key])) > xcheck_tol:
                    raise ValueError(f"{key}={m[key]!r} not confirmed by brute-force scan")
    return _pick_disjoint(
        bc.segments,
        lambda v: 0.0 <= v < m["M1(2)"] or m["M2(-2)"] < v < TWO_PI,
        lambda v: m["M1(-2)"] < v < m["M2(2)"])


# -- elastic regime ---------------------------------------------------------

def s1_expression(p: MaterialParams, alpha, beta):
    s, c = np.sin(alpha), np.cos(alpha)
    return (-2.0 * (p.c * c + p.a) * s
            - beta * (p.mu + p.a * s * s + p.mu_c * c * c))


def s1_pointwise(p: MaterialParams, alpha, beta):
    """No plastic flow at this node: the driving stress lies in [-sigma_y, sigma_y]."""
    return np.abs(s1_expression(p, alpha, beta)) <= p.sigma_y


def field_elastic_report(p: MaterialParams, f: ScalarField, beta: float):
    ok = s1_pointwise(p, f.values, beta)
    return float(np.mean(ok)), bool(np.all(ok))


def monotone_maxima(trace: BifurcationTrace, slack: float = 1e-10) -> bool:
    """True iff M1 strictly increases and M2 strictly decreases along the grid."""
    m1 = np.asarray(trace.branches["M1"], dtype=float)
    m2 = np.asarray(trace.branches["M2"], dtype=float)
    if np.isnan(m1).any() or np.isnan(m2).any():
        raise ValueError("monotone_maxima needs M1 and M2 at every beta")
    return bool(np.all(np.diff(m1) > slack) and np.all(np.diff(m2) < -slack))


def maxima_trends(trace: BifurcationTrace, slack: float = 1e-10) -> dict:
    """Direction of each maximum branch: 'increasing', 'decreasing' or 'mixed'."""
    out = {}
    for name in ("M1", "M2"):
        d = np.diff(np.asarray(trace.branches[name], dtype=float))
        out[name] = ("increasing" if np.all(d > slack) else
                     "decreasing" if np.all(d < -slack) else "mixed")
    return out
