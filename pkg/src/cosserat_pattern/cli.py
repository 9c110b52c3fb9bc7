"""Batch front-end.

Subcommands: potential, minima, harmonic, evolve, check, selftest.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import analysis, potential, solver
from .config import ConfigError, load_config
from .field import write_csv, write_pgm
from .params import elastic_sufficient, has_two_wells
from .potential import TWO_PI, NewtonError

log = logging.getLogger("cosserat_pattern")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class NumericalFailure(RuntimeError):
    pass


def _outdir(args, cfg):
    d = args.out or (cfg.output_dir() if cfg is not None else "out")
    os.makedirs(d, exist_ok=True)
    return d


def _floats(text):
    from .config import parse_number
    return [parse_number(x) for x in text.split(",") if x.strip()]


def _bool(v):
    return "true" if v else "false"


# -- subcommands ------------------------------------------------------------

def cmd_potential(cfg, out, betas=(), n_alpha=361):
    """Sample J and J_beta on n_alpha equispaced angles of [0, 2 pi], ends included.

    The default 361 gives a one-degree grid that contains pi.
    """
    if n_alpha < 2:
        raise ConfigError("--n-alpha must be at least 2")
    p = cfg.material()
    alpha = np.linspace(0.0, TWO_PI, n_alpha)
    cols = [alpha, potential.j_value(p, alpha)]
    names = ["alpha", "J"]
    for b in betas:
        cols.append(potential.jbeta_value(p, b, alpha))
        names.append(f"J_beta={b!r}")
    path = os.path.join(out, "potential.csv")
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def cmd_minima(cfg, out, beta_min=-2.0, beta_max=2.0, n_beta=81):
    p = cfg.material()
    grid = np.linspace(beta_min, beta_max, n_beta) if n_beta > 1 else np.array([beta_min])
    trace = potential.trace_extrema(p, grid)
    path = os.path.join(out, "trace.csv")
    trace.to_csv(path)
    return trace


def cmd_harmonic(cfg, out):
    grid, bc = cfg.grid(), cfg.boundary()
    fmts = cfg.formats()
    f = solver.solve_harmonic(grid, bc)
    write_csv(f, os.path.join(out, "alpha_harmonic.csv"))
    if "pgm" in fmts:
        write_pgm(f, os.path.join(out, "alpha_harmonic.pgm"), 0.0, TWO_PI)
    return f


def _wells(p, mode, beta):
    if mode == "case2_J":
        return [0.0, math.pi] if has_two_wells(p) else [0.0]
    return [q.alpha for q in potential.minima(potential.list_extrema(p, beta))]


def cmd_evolve(cfg, out):
    """Run the Allen-Cahn flow of the scenario and write the result files.

    Returns (final field, diagnostics, report, extra) where ``extra`` holds
    the summary lines written to partition.txt.
    """
    p, grid, bc = cfg.material(), cfg.grid(), cfg.boundary()
    drive, ecfg, fmts, init = cfg.drive(), cfg.evolve(), cfg.formats(), cfg.init_kind()
    if not p.mu2 > 0:
        raise ConfigError("[material] mu2 must be positive for evolve")
    f0 = solver.initial_field(grid, bc, init)
    elastic = []

    def snap(step, t, f, beta):
        if ecfg.mode == "case3_Jbeta":
            elastic.append(analysis.field_elastic_report(p, f, beta)[1])
        if "csv" in fmts:
            write_csv(f, os.path.join(out, f"alpha_snap_{step:07d}.csv"))
        if "pgm" in fmts:
            write_pgm(f, os.path.join(out, f"alpha_snap_{step:07d}.pgm"), 0.0, math.pi)

    final, diag = solver.evolve_to_stationary(f0, p, bc, drive, ecfg, on_snapshot=snap)
    beta_end = drive.beta_clamped(diag.times[-1])
    if ecfg.mode == "case3_Jbeta" and not ecfg.snapshot_every:
        elastic = [analysis.field_elastic_report(p, f0, drive.beta_clamped(drive.t_start))[1],
                   analysis.field_elastic_report(p, final, beta_end)[1]]
    write_csv(final, os.path.join(out, "alpha_final.csv"))
    diag.to_csv(os.path.join(out, "diag.csv"))
    wells = _wells(p, ecfg.mode, beta_end)
    report = analysis.label_cells(final, wells)
    extra = {
        "converged": diag.converged,
        "steps": diag.steps,
        "t": repr(diag.times[-1]),
        "dt": repr(diag.dt),
        "el_residual": repr(solver.el_residual(final, p, ecfg.mode, beta_end)),
        "energy": repr(diag.energies[-1]),
        "tl1": analysis.check_tl1(bc),
    }
    if ecfg.mode == "case3_Jbeta":
        frac, _ = analysis.field_elastic_report(p, final, beta_end)
        extra["elastic_fraction_final"] = repr(frac)
        extra["elastic_all_snapshots"] = all(elastic)
    with open(os.path.join(out, "partition.txt"), "w") as fh:
        fh.write(report.to_text(extra))
    if "pgm" in fmts:
        write_pgm(final, os.path.join(out, "alpha_final.pgm"), 0.0, math.pi)
        report.write_pgm(os.path.join(out, "labels.pgm"))
    return final, diag, report, extra


def cmd_check(cfg, out=None):
    """Evaluate the closed-form conditions; returns ``{name: bool}``."""
    p = cfg.material()
    drive = cfg.drive()
    res = {"mccond": has_two_wells(p), "s2": elastic_sufficient(p, drive.max_abs_beta())}
    if cfg.has("bc"):
        bc = cfg.boundary()
        res["tl1"] = analysis.check_tl1(bc)
        trace = potential.trace_extrema(p, np.linspace(-2.0, 2.0, 81))
        try:
            res["tl2"] = analysis.check_tl2(bc, trace, p)
        except ValueError as exc:
            log.warning("tl2 not available: %s", exc)
    text = "".join(f"{k}: {_bool(v)}\n" for k, v in res.items())
    sys.stdout.write(text)
    if out is not None:
        with open(os.path.join(out, "check.txt"), "w") as fh:
            fh.write(text)
    return res


def cmd_selftest(seed=0, n=1000):
    """Randomised consistency checks of the energy and potential formulas."""
    from . import energy
    from .params import MaterialParams, SlipSystem

    rng = np.random.default_rng(seed)
    ok = {}
    worst = 0.0
    for _ in range(n):
        p = MaterialParams(*rng.uniform(0.1, 10.0, 3), *rng.uniform(0.0, 5.0, 3))
        a, g, b = rng.uniform(0, TWO_PI), rng.uniform(-3, 3), rng.uniform(-3, 3)
        s = SlipSystem.rotated(rng.uniform(0, TWO_PI))
        w = energy.stretch_energy_matrix(p, energy.assemble_matrices(s, a, g, b))
        e = energy.stretch_part_expanded(p, a, g, b)
        worst = max(worst, abs(w - e) / max(1.0, abs(w)))
    ok["dual_path"] = worst <= 1e-10
    worst = 0.0
    for _ in range(n):
        p = MaterialParams(*rng.uniform(0.1, 10.0, 3))
        a, b, h = rng.uniform(0, TWO_PI), rng.uniform(-3, 3), 1e-5
        fd = (potential.jbeta_value(p, b, a + h) - potential.jbeta_value(p, b, a - h)) / (2 * h)
        an = potential.jbeta_deriv(p, b, a)
        worst = max(worst, abs(fd - an) / max(1.0, abs(an)))
    ok["derivative"] = worst <= 1e-6
    worst = 0.0
    for _ in range(n):
        lhs, rhs = energy.curvature_identity(rng.uniform(0, TWO_PI), rng.normal(size=2))
        worst = max(worst, abs(lhs - rhs))
    ok["curvature_identity"] = worst <= 1e-12
    for k, v in ok.items():
        sys.stdout.write(f"{k}: {'pass' if v else 'FAIL'}\n")
    return all(ok.values())


# -- entry point ------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="cosserat-pattern", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="scenario file")
    ap.add_argument("--out", help="output directory (overrides [output] dir)")
    ap.add_argument("--seed", type=int, default=0, help="RNG seed for selftest")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("potential", help="sample J and J_beta")
    sp.add_argument("--beta", default="", help="comma-separated beta values")
    sp.add_argument("--n-alpha", type=int, default=361)
    sm = sub.add_parser("minima", help="trace extremum branches of J_beta")
    sm.add_argument("--beta-min", type=float, default=-2.0)
    sm.add_argument("--beta-max", type=float, default=2.0)
    sm.add_argument("--n-beta", type=int, default=81)
    sub.add_parser("harmonic", help="solve the harmonic limit")
    sub.add_parser("evolve", help="run the Allen-Cahn flow to stationarity")
    sub.add_parser("check", help="evaluate mccond, s2, tl1, tl2")
    sub.add_parser("selftest", help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "selftest":
            return EXIT_OK if cmd_selftest(args.seed) else EXIT_NUMERIC
        if not args.config:
            raise ConfigError("--config is required")
        cfg = load_config(args.config)
        if args.command == "check":
            cmd_check(cfg, _outdir(args, cfg) if args.out else None)
            return EXIT_OK
        # build every typed view first so config errors surface before work
        cfg.material()
        if args.command in ("harmonic", "evolve"):
            cfg.grid(), cfg.boundary(), cfg.formats()
        if args.command == "evolve":
            cfg.drive(), cfg.evolve(), cfg.init_kind()
        out = _outdir(args, cfg)
        if args.command == "potential":
            cmd_potential(cfg, out, _floats(args.beta), args.n_alpha)
        elif args.command == "minima":
            cmd_minima(cfg, out, args.beta_min, args.beta_max, args.n_beta)
        elif args.command == "harmonic":
            cmd_harmonic(cfg, out)
        elif args.command == "evolve":
            _, diag, _, _ = cmd_evolve(cfg, out)
            if not diag.converged:
                log.error("flow did not become stationary within the step budget")
                return EXIT_NUMERIC
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (solver.SolverError, NewtonError, NumericalFailure, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
