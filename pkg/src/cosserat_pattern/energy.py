"""Energy density of the reduced shear problem, computed two independent ways.

``stretch_energy_matrix`` builds F_p, P, R_e and U_e as 2x2 matrices and
evaluates the stretch energy with Frobenius norms; ``density_expanded`` uses
the closed trigonometric expansion in (alpha, gamma, beta). Agreement of the
two is the main consistency check of the expansion. The dislocation variable
is eliminated (kappa = -|gamma| with kappa_0 = gamma_0 = 0), so V = rho*gamma^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ScalarField, check_same_grid
from .params import MaterialParams, SlipSystem

_ID = np.eye(2)


@dataclass(frozen=True)
class PointState:
    alpha: float
    gamma: float = 0.0
    beta: float = 0.0
    grad_alpha_sq: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.grad_alpha_sq) < 0):
            raise ValueError("grad_alpha_sq must be non-negative")


@dataclass(frozen=True)
class MatrixForms:
    Fp: np.ndarray
    P: np.ndarray
    Ue: np.ndarray
    Re: np.ndarray


def rotation(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


def rotation_deriv(alpha: float) -> np.ndarray:
    """d R(alpha) / d alpha."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[-s, -c], [c, -s]])


def sym(a):
    return 0.5 * (a + a.T)


def skw(a):
    return 0.5 * (a - a.T)


def frob_sq(a) -> float:
    return float(np.trace(a.T @ a))


def assemble_matrices(s: SlipSystem, alpha: float, gamma: float, beta: float) -> MatrixForms:
    mn = s.dyad()
    Re = rotation(alpha)
    return MatrixForms(Fp=_ID + gamma * mn, P=_ID - gamma * mn,
                       Ue=Re.T @ (_ID + (beta - gamma) * mn), Re=Re)


def stretch_energy_matrix(p: MaterialParams, mf: MatrixForms) -> float:
    U = mf.Ue
    tr = np.trace(U - _ID)
    return p.mu * frob_sq(sym(U) - _ID) + p.mu_c * frob_sq(skw(U)) + 0.5 * p.lam * tr * tr


def density(p: MaterialParams, alpha, gamma=0.0, beta=0.0, grad_alpha_sq=0.0):
    """Expanded energy density; broadcasts over numpy arrays."""
    s, c = np.sin(alpha), np.cos(alpha)
    d = gamma - beta
    a = p.a
    return (2.0 * p.mu2 * grad_alpha_sq + p.rho * gamma * gamma + p.sigma_y * np.abs(gamma)
            + 2.0 * a * (1.0 - c) ** 2 + 2.0 * p.mu_c * s * s
            - 2.0 * d * (p.c * c + a) * s
            + 0.5 * d * d * (p.mu + a * s * s + p.mu_c * c * c))


def density_expanded(p: MaterialParams, st: PointState):
    return density(p, st.alpha, st.gamma, st.beta, st.grad_alpha_sq)


def stretch_part_expanded(p: MaterialParams, alpha, gamma, beta):
    """density minus the curvature, hardening and dissipation terms."""
    return (density(p, alpha, gamma, beta)
            - p.rho * gamma * gamma - p.sigma_y * np.abs(gamma))


def total_energy(p: MaterialParams, alpha_field: ScalarField, gamma_field, beta: float) -> float:
    """Discrete integral of the density over the grid.

    Local terms use trapezoidal node weights; the curvature term sums squared
    edge differences (half weight on boundary edges). This is the energy whose
    gradient with respect to interior nodes is the five-point Allen-Cahn
    operator, so explicit flow steps decrease it. ``gamma_field`` may be a
    ScalarField or a scalar.
    """
    if isinstance(gamma_field, ScalarField):
        check_same_grid(alpha_field, gamma_field)
        g = gamma_field.values
    else:
        g = np.full(alpha_field.grid.shape, float(gamma_field))
    grid = alpha_field.grid
    return float(kernels.energy(alpha_field.values, g, float(beta), grid.hx, grid.hy,
                                p.lam, p.mu, p.mu_c, p.mu2, p.rho, p.sigma_y))


def gamma_convexity_coeff(p: MaterialParams, alpha):
    """d^2 W_st / d gamma^2 = mu + (lambda+mu) sin^2 + mu_c cos^2 > 0."""
    s, c = np.sin(alpha), np.cos(alpha)
    return p.mu + p.a * s * s + p.mu_c * c * c


def pointwise_gamma_min(p: MaterialParams, alpha, beta):
    """Exact minimiser in gamma of the pointwise density.

    The density is (rho + k/2) gamma^2 - b gamma + sigma_y |gamma| + const with
    k the convexity coefficient and b = 2 ((mu_c-lambda-mu) cos + lambda+mu) sin
    + k beta, so the minimiser is a soft threshold of b.
    """
    s, c = np.sin(alpha), np.cos(alpha)
    k = gamma_convexity_coeff(p, alpha)
    b = 2.0 * (p.c * c + p.a) * s + k * beta
    return np.sign(b) * np.maximum(np.abs(b) - p.sigma_y, 0.0) / (2.0 * p.rho + k)


def curvature_identity(alpha: float, dalpha) -> tuple:
    """(sum_l |R^t d_l R|^2, 2 |grad alpha|^2) from exact matrix derivatives."""
    R = rotation(alpha)
    dR = rotation_deriv(alpha)
    lhs = 0.0
    for g in dalpha:
        lhs += frob_sq(R.T @ (dR * g))
    rhs = 2.0 * sum(g * g for g in dalpha)
    return lhs, rhs
