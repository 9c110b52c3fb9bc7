"""Hot stencil kernels with a selectable backend.

numba is used when importable unless ``COSSERAT_PATTERN_NUMBA=0`` is set in
the environment, in which case the vectorised numpy kernels are used. Both
backends expose the same functions; ``backend(name)`` returns either module
explicitly (benchmarks and cross-backend tests use it).
"""
import os

from . import _numpy

_NAMES = ("laplacian5", "helmholtz_apply", "cg_solve", "reaction",
          "ac_explicit_step", "ac_semi_rhs", "el_residual", "energy")


def backend(name):
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("COSSERAT_PATTERN_NUMBA", "1").strip().lower() in ("0", "false", "no", "off"):
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = _select()
_impl = backend(BACKEND)

laplacian5 = _impl.laplacian5
helmholtz_apply = _impl.helmholtz_apply
cg_solve = _impl.cg_solve
reaction = _impl.reaction
ac_explicit_step = _impl.ac_explicit_step
ac_semi_rhs = _impl.ac_semi_rhs
el_residual = _impl.el_residual
energy = _impl.energy
