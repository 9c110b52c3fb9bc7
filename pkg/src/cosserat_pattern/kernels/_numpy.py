"""Vectorised numpy stencil kernels (reference / fallback backend).

All kernels act on ``(ny, nx)`` float64 arrays. "Interior" means rows and
columns 1..n-2; boundary nodes are Dirichlet data and never updated.
"""
import numpy as np


def _lap(v, hx, hy):
    c = v[1:-1, 1:-1]
    return ((v[1:-1, :-2] - 2.0 * c + v[1:-1, 2:]) / (hx * hx)
            + (v[:-2, 1:-1] - 2.0 * c + v[2:, 1:-1]) / (hy * hy))


def _reaction(a, A, C2, C, hb):
    s = np.sin(a)
    c = np.cos(a)
    return (A + C2 * c) * s + hb * (A * c + C * (c * c - s * s))


def laplacian5(v, out, hx, hy):
    out[...] = 0.0
    out[1:-1, 1:-1] = _lap(v, hx, hy)


def helmholtz_apply(x, out, shift, coef, hx, hy):
    """out = shift*x - coef*Lap(x) at interior nodes, 0 on the boundary."""
    out[...] = 0.0
    out[1:-1, 1:-1] = shift * x[1:-1, 1:-1] - coef * _lap(x, hx, hy)


def _true_residual(rhs, x, r, ap, shift, coef, hx, hy):
    helmholtz_apply(x, ap, shift, coef, hx, hy)
    r[1:-1, 1:-1] = rhs[1:-1, 1:-1] - ap[1:-1, 1:-1]
    return np.max(np.abs(r)), np.sum(r * r)


def cg_solve(rhs, x, shift, coef, hx, hy, tol, max_iter):
    """Conjugate gradients for (shift - coef*Lap) x = rhs on the interior.

    ``x`` holds the initial guess and the Dirichlet values; it is updated in
    place. Convergence is confirmed on the true residual. Returns
    (iterations, sup-norm residual).
    """
    ap = np.empty_like(x)
    r = np.zeros_like(x)
    res, rr = _true_residual(rhs, x, r, ap, shift, coef, hx, hy)
    if res <= tol:
        return 0, res
    p = r.copy()
    for it in range(1, max_iter + 1):
        helmholtz_apply(p, ap, shift, coef, hx, hy)
        step = rr / np.sum(p * ap)
        x[1:-1, 1:-1] += step * p[1:-1, 1:-1]
        r -= step * ap
        res = np.max(np.abs(r))
        if res <= tol:
            # confirm against the true residual; restart from it on drift
            res, rr = _true_residual(rhs, x, r, ap, shift, coef, hx, hy)
            if res <= tol:
                return it, res
            p[...] = r
            continue
        rr_new = np.sum(r * r)
        p *= rr_new / rr
        p += r
        rr = rr_new
    return max_iter, res


def reaction(a, out, A, C2, C, hb):
    out[...] = _reaction(a, A, C2, C, hb)


def ac_explicit_step(a, out, mu2, dt, A, C2, C, hb, hx, hy):
    """One forward-Euler Allen-Cahn step; returns max |out - a|."""
    out[...] = a
    ai = a[1:-1, 1:-1]
    out[1:-1, 1:-1] = ai + dt * (mu2 * _lap(a, hx, hy) - _reaction(ai, A, C2, C, hb))
    return np.max(np.abs(out[1:-1, 1:-1] - ai))


def ac_semi_rhs(a, out, dt, A, C2, C, hb):
    """Right-hand side a - dt*J'(a); boundary nodes keep the Dirichlet data."""
    out[...] = a
    ai = a[1:-1, 1:-1]
    out[1:-1, 1:-1] = ai - dt * _reaction(ai, A, C2, C, hb)


def el_residual(a, mu2, A, C2, C, hb, hx, hy):
    ai = a[1:-1, 1:-1]
    return np.max(np.abs(-mu2 * _lap(a, hx, hy) + _reaction(ai, A, C2, C, hb)))


def energy(a, g, beta, hx, hy, lam, mu, mu_c, mu2, rho, sigma_y):
    """Discrete energy: trapezoidal node sum plus staggered edge gradients."""
    A = lam + mu
    C = mu_c - lam - mu
    s = np.sin(a)
    c = np.cos(a)
    d = g - beta
    local = (rho * g * g + sigma_y * np.abs(g) + 2.0 * A * (1.0 - c) ** 2
             + 2.0 * mu_c * s * s - 2.0 * d * (C * c + A) * s
             + 0.5 * d * d * (mu + A * s * s + mu_c * c * c))
    w = np.ones_like(a)
    w[0, :] *= 0.5
    w[-1, :] *= 0.5
    w[:, 0] *= 0.5
    w[:, -1] *= 0.5
    ex = (a[:, 1:] - a[:, :-1]) / hx
    ey = (a[1:, :] - a[:-1, :]) / hy
    wx = np.ones_like(ex)
    wx[0, :] = wx[-1, :] = 0.5
    wy = np.ones_like(ey)
    wy[:, 0] = wy[:, -1] = 0.5
    grad = np.sum(wx * ex * ex) + np.sum(wy * ey * ey)
    return hx * hy * (np.sum(w * local) + 2.0 * mu2 * grad)
