"""Harmonic and Allen-Cahn solvers for the micro-rotation angle.

The Allen-Cahn flow d_t alpha = mu2 Lap(alpha) - J'(alpha) is integrated on
the node grid with the five-point Laplacian and strongly imposed Dirichlet
data. Mode ``case2_J`` uses the ultra-soft potential J, mode ``case3_Jbeta``
the elastic-regime potential J_beta with beta taken from a ShearDrive.
Angles live on the real line; nothing is wrapped here.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels, potential
from .energy import total_energy
from .field import BoundarySpec, Grid2D, ScalarField, apply_dirichlet, boundary_field
from .params import MaterialParams, ShearDrive

log = logging.getLogger(__name__)

MODES = ("case2_J", "case3_Jbeta")
SCHEMES = ("explicit", "semi_implicit")


class SolverError(RuntimeError):
    pass


class ConvergenceError(SolverError):
    """Iteration budget exhausted; ``residual`` is the last residual."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class EvolutionError(SolverError):
    """Non-finite values appeared; ``step`` names the offending step."""

    def __init__(self, msg, step):
        super().__init__(msg)
        self.step = step


def _check_mu2(p: MaterialParams):
    if not p.mu2 > 0:
        raise ValueError(
            "mu2 = 0 has no Allen-Cahn flow: without the gradient term the "
            "minimiser is alpha in {0, pi} almost everywhere and is not a PDE solution")


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


# -- harmonic limit ---------------------------------------------------------

def solve_harmonic(grid: Grid2D, bc: BoundarySpec, tol: float = 1e-10,
                   max_iter: Optional[int] = None, x0: Optional[ScalarField] = None) -> ScalarField:
    """Solve -Lap(alpha) = 0 with alpha = alpha_D on the boundary by CG.

    Stops when the sup-norm of the discrete Laplacian at interior nodes is at
    most ``tol``; raises ConvergenceError otherwise.
    """
    if max_iter is None:
        max_iter = 20 * (grid.nx + grid.ny) + 200
    start = ScalarField.zeros(grid) if x0 is None else x0
    x = apply_dirichlet(start, bc).values.copy()
    rhs = np.zeros_like(x)
    _, res = kernels.cg_solve(rhs, x, 0.0, 1.0, grid.hx, grid.hy, float(tol), int(max_iter))
    if not res <= tol:
        raise ConvergenceError(f"harmonic CG did not converge in {max_iter} iterations "
                               f"(residual {res:.3e})", float(res))
    return ScalarField(grid, x)


# -- Allen-Cahn -------------------------------------------------------------

def _coeffs(p: MaterialParams, mode, beta):
    """(A, C2, C, hb) such that J'(a) = (A + C2 cos)sin + hb(A cos + C cos2a)."""
    _check_mode(mode)
    if mode == "case2_J":
        return p.a, p.c, p.c, 0.0
    return p.a, p.c * (1.0 - 0.25 * beta * beta), p.c, 0.5 * beta


def reaction(p: MaterialParams, mode, beta: float, alpha):
    _check_mode(mode)
    if mode == "case2_J":
        return potential.j_deriv(p, alpha)
    return potential.jbeta_deriv(p, beta, alpha)


def mode_gamma(mode, beta: float) -> float:
    """Plastic slip that goes with each mode: gamma = beta (soft) or 0 (elastic)."""
    return beta if mode == "case2_J" else 0.0


def second_bound(p: MaterialParams, mode, beta: float) -> float:
    return potential.jbeta_second_bound(p, 0.0 if mode == "case2_J" else beta)


def auto_dt(grid: Grid2D, p: MaterialParams, mode="case2_J", beta: float = 0.0,
            scheme="explicit") -> float:
    """Stable default step.

    Explicit: min(0.2 h^2/mu2, 0.5/max(1, sup|J''|)), further capped so that
    dt * (4 mu2 (1/hx^2 + 1/hy^2) + sup|J''|) <= 1.8, which keeps the explicit
    step a descent step for the discrete energy. Semi-implicit: only the
    reaction cap, since diffusion is treated implicitly.
    """
    _check_mu2(p)
    jb = second_bound(p, mode, beta)
    dt = 0.5 / max(1.0, jb)
    if scheme == "semi_implicit":
        return dt
    h = min(grid.hx, grid.hy)
    lip = 4.0 * p.mu2 * (1.0 / grid.hx ** 2 + 1.0 / grid.hy ** 2) + jb
    return min(dt, 0.2 * h * h / p.mu2, 1.8 / lip)


def ac_step(f: ScalarField, p: MaterialParams, mode, beta: float, dt: float,
            scheme="explicit", cg_tol: float = 1e-10) -> ScalarField:
    """One Allen-Cahn step; boundary values of ``f`` are kept."""
    out, _ = _step(f.values, f.grid, p, mode, beta, dt, scheme, cg_tol)
    return ScalarField(f.grid, out)


def _step(a, grid, p, mode, beta, dt, scheme, cg_tol, out=None):
    _check_mu2(p)
    A, C2, C, hb = _coeffs(p, mode, beta)
    if out is None:
        out = np.empty_like(a)
    if scheme == "explicit":
        change = kernels.ac_explicit_step(a, out, p.mu2, dt, A, C2, C, hb, grid.hx, grid.hy)
        return out, float(change)
    if scheme != "semi_implicit":
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    rhs = np.empty_like(a)
    kernels.ac_semi_rhs(a, rhs, dt, A, C2, C, hb)
    out[...] = a
    n = (grid.nx - 2) * (grid.ny - 2)
    coef = dt * p.mu2
    # an absolute cg_tol can sit below the rounding floor eps*|A|*|x| once
    # dt*mu2/h^2 is large; never ask for less than a few times that floor
    op_norm = 1.0 + 4.0 * coef * (1.0 / grid.hx ** 2 + 1.0 / grid.hy ** 2)
    floor = 8.0 * np.finfo(float).eps * op_norm * max(1.0, float(np.max(np.abs(rhs))))
    tol = max(cg_tol, floor)
    _, res = kernels.cg_solve(rhs, out, 1.0, coef, grid.hx, grid.hy, tol, n)
    if not res <= tol:
        raise ConvergenceError(f"inner CG residual {res:.3e} above {tol:.1e}", float(res))
    change = np.max(np.abs(out[1:-1, 1:-1] - a[1:-1, 1:-1]))
    return out, float(change)


def el_residual(f: ScalarField, p: MaterialParams, mode, beta: float = 0.0) -> float:
    """sup over interior nodes of |-mu2 Lap(alpha) + J'(alpha)|."""
    _check_mu2(p)
    A, C2, C, hb = _coeffs(p, mode, beta)
    return float(kernels.el_residual(f.values, p.mu2, A, C2, C, hb, f.grid.hx, f.grid.hy))


@dataclass(frozen=True)
class EvolveConfig:
    dt: Optional[float] = None          # None -> auto_dt
    t_end: float = math.inf
    stat_tol: float = 1e-8
    max_steps: int = 1_000_000
    scheme: str = "explicit"
    mode: str = "case2_J"
    record_every: int = 100
    snapshot_every: int = 0
    cg_tol: float = 1e-10              # inner CG, raised to the rounding floor if needed

    def __post_init__(self):
        if not self.stat_tol > 0:
            raise ValueError("stat_tol must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        _check_mode(self.mode)
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class EvolutionDiagnostics:
    steps: int = 0
    times: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    recorded_steps: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    converged: bool = False
    dt: float = math.nan

    def record(self, step, t, energy, residual, beta):
        self.recorded_steps.append(step)
        self.times.append(t)
        self.energies.append(energy)
        self.residuals.append(residual)
        self.betas.append(beta)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("step,t,energy,residual\n")
            for row in zip(self.recorded_steps, self.times, self.energies, self.residuals):
                fh.write("%d,%r,%r,%r\n" % (row[0], float(row[1]), float(row[2]), float(row[3])))


def evolve_to_stationary(f0: ScalarField, p: MaterialParams, bc: Optional[BoundarySpec],
                         drive: Optional[ShearDrive] = None,
                         cfg: EvolveConfig = EvolveConfig(),
                         on_snapshot: Optional[Callable] = None):
    """Run the Allen-Cahn flow until |alpha^{n+1} - alpha^n|_inf / dt < stat_tol.

    beta(t) is sampled at the start of each step and frozen after the drive
    ends; stationarity is only tested once the drive has ended. Energies are
    evaluated with gamma = beta (case2_J) or gamma = 0 (case3_Jbeta).
    ``on_snapshot(step, t, field, beta)`` is called every ``snapshot_every``
    steps and on the final state. Returns (final field, diagnostics).
    """
    _check_mu2(p)
    drive = drive or ShearDrive.constant(0.0)
    grid = f0.grid
    start = apply_dirichlet(f0, bc) if bc is not None else f0
    if bc is not None and not np.array_equal(start.values, f0.values):
        log.debug("initial field did not match boundary data; boundary imposed")
    a = start.values.copy()
    buf = np.empty_like(a)

    t = drive.t_start
    if cfg.dt is None:
        # reaction stiffness from the largest |beta| the drive reaches
        beta_worst = max((b for _, b in drive.samples), key=abs)
        dt = auto_dt(grid, p, cfg.mode, beta_worst, cfg.scheme)
    else:
        dt = float(cfg.dt)
    diag = EvolutionDiagnostics(dt=dt)

    def measure(arr, beta):
        fld = ScalarField(grid, arr)
        e = total_energy(p, fld, mode_gamma(cfg.mode, beta), beta)
        return e, el_residual(fld, p, cfg.mode, beta)

    beta = drive.beta_clamped(t)
    e, r = measure(a, beta)
    diag.record(0, t, e, r, beta)
    if on_snapshot is not None and cfg.snapshot_every:
        on_snapshot(0, t, ScalarField(grid, a.copy()), beta)

    step = 0
    t_end = drive.t_start + cfg.t_end
    while step < cfg.max_steps and t < t_end:
        beta = drive.beta_clamped(t)
        buf, change = _step(a, grid, p, cfg.mode, beta, dt, cfg.scheme, cfg.cg_tol, out=buf)
        step += 1
        t = drive.t_start + step * dt
        if not math.isfinite(change) or not np.isfinite(buf).all():
            raise EvolutionError(f"non-finite field values at step {step}", step)
        a, buf = buf, a
        done = t >= drive.t_final and change / dt < cfg.stat_tol
        beta_now = drive.beta_clamped(t)
        if done or step % cfg.record_every == 0:
            e, r = measure(a, beta_now)
            diag.record(step, t, e, r, beta_now)
        if on_snapshot is not None and cfg.snapshot_every and step % cfg.snapshot_every == 0:
            on_snapshot(step, t, ScalarField(grid, a.copy()), beta_now)
        if done:
            diag.converged = True
            break

    if diag.recorded_steps[-1] != step:
        e, r = measure(a, drive.beta_clamped(t))
        diag.record(step, t, e, r, drive.beta_clamped(t))
    diag.steps = step
    final = ScalarField(grid, a)
    if on_snapshot is not None and cfg.snapshot_every and step % cfg.snapshot_every != 0:
        on_snapshot(step, t, final, drive.beta_clamped(t))
    return final, diag


def initial_field(grid: Grid2D, bc: BoundarySpec, kind="harmonic") -> ScalarField:
    """Harmonic extension of the boundary data, or a constant interior value."""
    if kind == "harmonic":
        return solve_harmonic(grid, bc)
    return boundary_field(grid, bc, float(kind))


def case2_gamma(drive: ShearDrive, t: float) -> float:
    """Plastic slip of the ultra-soft case: it follows the applied shear."""
    return drive.beta(t)
