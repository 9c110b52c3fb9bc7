"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--sizes 128,256] [--repeat 5]

Prints one row per (kernel, grid size) with the best wall time of each
backend and the speed-up, then times a full soft-case run to stationarity.
"""
import argparse
import math
import time

import numpy as np

from cosserat_pattern import kernels
from cosserat_pattern.field import BoundarySpec, Grid2D


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation for numba
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(mod, n):
    rng = np.random.default_rng(0)
    a = rng.uniform(0, math.pi, (n, n))
    out = np.empty_like(a)
    g = np.zeros_like(a)
    h = 1.0 / (n - 1)
    coef = (2.0, 10.0, 10.0, 0.0)

    def cg():
        x = a.copy()
        x[1:-1, 1:-1] = 0.0
        mod.cg_solve(np.zeros_like(a), x, 0.0, 1.0, h, h, 1e-8, 10 * n)

    return {
        "laplacian5": lambda: mod.laplacian5(a, out, h, h),
        "ac_explicit_step": lambda: mod.ac_explicit_step(a, out, 1e-3, 1e-3, *coef, h, h),
        "el_residual": lambda: mod.el_residual(a, 1e-3, *coef, h, h),
        "energy": lambda: mod.energy(a, g, 0.0, h, h, 1.0, 1.0, 12.0, 1e-3, 0.0, 0.0),
        "cg_solve (harmonic)": cg,
    }


def full_run(backend_name, n):
    """Soft-case flow to stationarity with the chosen backend patched in."""
    from cosserat_pattern import solver
    from cosserat_pattern.params import MaterialParams

    mod = kernels.backend(backend_name)
    saved = {k: getattr(kernels, k) for k in kernels._NAMES}
    for k in kernels._NAMES:
        setattr(kernels, k, getattr(mod, k))
    try:
        grid = Grid2D(n, n)
        bc = BoundarySpec.sides(left=0.0, right=math.pi, bottom=0.0, top=math.pi)
        f0 = solver.solve_harmonic(grid, bc)
        t0 = time.perf_counter()
        _, d = solver.evolve_to_stationary(f0, MaterialParams(1, 1, 12, 1e-3), bc)
        return time.perf_counter() - t0, d.steps
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="128,256")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-full", action="store_true", help="skip the full flow timing")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    np_mod, nb_mod = kernels.backend("numpy"), kernels.backend("numba")

    print(f"{'kernel':<22}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speed-up':>10}")
    for n in sizes:
        for name in kernel_cases(np_mod, n):
            t_np = best_of(kernel_cases(np_mod, n)[name], args.repeat)
            t_nb = best_of(kernel_cases(nb_mod, n)[name], args.repeat)
            print(f"{name:<22}{n:>6}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")
    if not args.no_full:
        n = sizes[0]
        full_run("numba", 17)  # compile outside the timed region
        t_np, steps = full_run("numpy", n)
        t_nb, _ = full_run("numba", n)
        print(f"\nfull flow {n}x{n} ({steps} steps): numpy {t_np:.2f}s, numba {t_nb:.2f}s, "
              f"speed-up {t_np / t_nb:.1f}")


if __name__ == "__main__":
    main()
