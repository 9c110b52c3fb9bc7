import os
import subprocess
import sys

import numpy as np
import pytest

from cosserat_pattern import kernels

numba = pytest.importorskip("numba")
NP, NB = kernels.backend("numpy"), kernels.backend("numba")
H = (1 / 30, 1 / 20)
COEF = (2.0, 4.5, 6.0, 0.7)       # A, C2, C, hb


@pytest.fixture
def arr(rng):
    return rng.uniform(-1, 4, (21, 31))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend("fortran")


@pytest.mark.parametrize("name", ["laplacian5"])
def test_laplacian_agree(arr, name):
    a, b = np.empty_like(arr), np.empty_like(arr)
    NP.laplacian5(arr, a, *H)
    NB.laplacian5(arr, b, *H)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-10)


def test_helmholtz_and_reaction_agree(arr):
    a, b = np.empty_like(arr), np.empty_like(arr)
    NP.helmholtz_apply(arr, a, 1.0, 0.3, *H)
    NB.helmholtz_apply(arr, b, 1.0, 0.3, *H)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-10)
    NP.reaction(arr, a, *COEF)
    NB.reaction(arr, b, *COEF)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)


def test_explicit_step_agree(arr):
    a, b = np.empty_like(arr), np.empty_like(arr)
    ca = NP.ac_explicit_step(arr, a, 1e-3, 1e-3, *COEF, *H)
    cb = NB.ac_explicit_step(arr, b, 1e-3, 1e-3, *COEF, *H)
    assert np.allclose(a, b, rtol=1e-14, atol=1e-14)
    assert ca == pytest.approx(cb, rel=1e-12)
    assert np.array_equal(a[0], arr[0]) and np.array_equal(b[:, -1], arr[:, -1])


def test_semi_rhs_and_residual_agree(arr):
    a, b = np.empty_like(arr), np.empty_like(arr)
    NP.ac_semi_rhs(arr, a, 0.01, *COEF)
    NB.ac_semi_rhs(arr, b, 0.01, *COEF)
    assert np.allclose(a, b, rtol=1e-14, atol=1e-14)
    ra = NP.el_residual(arr, 1e-3, *COEF, *H)
    rb = NB.el_residual(arr, 1e-3, *COEF, *H)
    assert ra == pytest.approx(rb, rel=1e-12)


def test_energy_agree(arr, rng):
    g = rng.uniform(-1, 1, arr.shape)
    args = (0.4, *H, 1.0, 1.0, 12.0, 1e-2, 0.5, 2.0)
    assert NP.energy(arr, g, *args) == pytest.approx(NB.energy(arr, g, *args), rel=1e-12)


@pytest.mark.parametrize("shift,coef", [(0.0, 1.0), (1.0, 0.05)])
def test_cg_agree(arr, shift, coef):
    rhs = np.zeros_like(arr) if shift == 0.0 else arr.copy()
    xa, xb = arr.copy(), arr.copy()
    xa[1:-1, 1:-1] = xb[1:-1, 1:-1] = 0.0
    ia, ra = NP.cg_solve(rhs, xa, shift, coef, *H, 1e-11, 2000)
    ib, rb = NB.cg_solve(rhs, xb, shift, coef, *H, 1e-11, 2000)
    assert ra <= 1e-11 and rb <= 1e-11
    assert abs(ia - ib) <= 2
    assert np.allclose(xa, xb, atol=1e-9)
    check = np.empty_like(xa)
    NP.helmholtz_apply(xa, check, shift, coef, *H)
    assert np.max(np.abs(check - rhs)[1:-1, 1:-1]) <= 1e-11


def test_env_flag_selects_numpy():
    env = dict(os.environ, COSSERAT_PATTERN_NUMBA="0")
    out = subprocess.run([sys.executable, "-c",
                          "from cosserat_pattern import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
