"""Material constants, slip system and shear drive for the 2D shear problem."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

# Fixed reduction of the curvature energy to W_c = mu2 * |grad R|^2.
L_C = math.sqrt(2.0)
ALPHA_4 = 0.0
ALPHA_5 = 1.0
ALPHA_6 = 1.0
ALPHA_7 = 0.0
P_EXP = 1.0
Q_EXP = 0.0


class ParameterError(ValueError):
    """Raised when a material constant, slip system or drive is invalid."""


@dataclass(frozen=True)
class MaterialParams:
    lam: float
    mu: float
    mu_c: float
    mu2: float = 1.0
    rho: float = 0.0
    sigma_y: float = 0.0

    @property
    def a(self) -> float:
        """lambda + mu, the coefficient of the cos-term of J."""
        return self.lam + self.mu

    @property
    def c(self) -> float:
        """mu_c - lambda - mu, the coefficient of the sin^2-term of J."""
        return self.mu_c - self.lam - self.mu

    @property
    def scale(self) -> float:
        return self.lam + self.mu + self.mu_c


_POSITIVE = ("lam", "mu", "mu_c")
_NONNEGATIVE = ("mu2", "rho", "sigma_y")
# config/user facing names
FIELD_NAMES = {"lam": "lambda", "mu": "mu", "mu_c": "mu_c", "mu2": "mu2",
               "rho": "rho", "sigma_y": "sigma_y"}


def validate(raw: MaterialParams) -> MaterialParams:
    """Check finiteness and sign constraints; return ``raw`` unchanged.

    lambda, mu and mu_c must be strictly positive. mu2, rho and sigma_y may be
    zero so that the limiting cases (no curvature, ultra-soft material) can be
    represented.
    """
    for f in fields(raw):
        v = getattr(raw, f.name)
        name = FIELD_NAMES[f.name]
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise ParameterError(f"{name} must be a real number, got {v!r}") from None
        if not math.isfinite(v):
            raise ParameterError(f"{name} must be finite, got {v!r}")
        if f.name in _POSITIVE and not v > 0:
            raise ParameterError(f"{name} must be positive, got {v!r}")
        if f.name in _NONNEGATIVE and not v >= 0:
            raise ParameterError(f"{name} must be non-negative, got {v!r}")
    return raw


def has_two_wells(p: MaterialParams) -> bool:
    """True iff mu_c > 2(lambda + mu): J then has local minima at 0 and pi."""
    return p.mu_c > 2.0 * (p.lam + p.mu)


def elastic_sufficient(p: MaterialParams, beta: float) -> bool:
    """Alpha-independent sufficient condition for the absence of plastic flow."""
    lhs = 2.0 * max(2.0 * (p.lam + p.mu) - p.mu_c, p.mu_c) \
        + abs(beta) * (p.lam + 2.0 * p.mu + p.mu_c)
    return lhs <= p.sigma_y


@dataclass(frozen=True)
class SlipSystem:
    m: tuple = (1.0, 0.0)
    n: tuple = (0.0, 1.0)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if m.shape != (2,) or n.shape != (2,):
            raise ParameterError("slip vectors must be 2-vectors")
        if abs(np.linalg.norm(m) - 1.0) > 1e-12 or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ParameterError("slip vectors m and n must have unit length")
        if abs(m @ n) > 1e-12:
            raise ParameterError("slip vectors m and n must be orthogonal")
        object.__setattr__(self, "m", tuple(float(x) for x in m))
        object.__setattr__(self, "n", tuple(float(x) for x in n))

    @classmethod
    def rotated(cls, theta: float) -> "SlipSystem":
        """Right-handed frame m = (cos t, sin t), n = (-sin t, cos t)."""
        c, s = math.cos(theta), math.sin(theta)
        return cls((c, s), (-s, c))

    def dyad(self) -> np.ndarray:
        return np.outer(self.m, self.n)


@dataclass(frozen=True)
class ShearDrive:
    """Piecewise-linear shear amplitude beta(t) through ``samples``."""

    samples: tuple

    def __post_init__(self):
        s = tuple((float(t), float(b)) for t, b in self.samples)
        if not s:
            raise ParameterError("shear drive needs at least one (t, beta) sample")
        ts = [t for t, _ in s]
        if any(not math.isfinite(v) for pair in s for v in pair):
            raise ParameterError("shear drive samples must be finite")
        if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
            raise ParameterError("shear drive times must be strictly increasing")
        object.__setattr__(self, "samples", s)

    @classmethod
    def constant(cls, beta: float = 0.0) -> "ShearDrive":
        return cls(((0.0, beta),))

    @property
    def t_start(self) -> float:
        return self.samples[0][0]

    @property
    def t_final(self) -> float:
        return self.samples[-1][0]

    @property
    def beta_final(self) -> float:
        return self.samples[-1][1]

    def max_abs_beta(self) -> float:
        return max(abs(b) for _, b in self.samples)

    def beta(self, t: float) -> float:
        """Interpolated beta(t); raises for t outside the sampled range."""
        if t < self.t_start or t > self.t_final:
            raise ParameterError(
                f"t={t!r} outside drive range [{self.t_start!r}, {self.t_final!r}]")
        return self.beta_clamped(t)

    def beta_clamped(self, t: float) -> float:
        """beta(t), held at the end values outside the sampled range."""
        ts = [t for t, _ in self.samples]
        bs = [b for _, b in self.samples]
        return float(np.interp(t, ts, bs))
