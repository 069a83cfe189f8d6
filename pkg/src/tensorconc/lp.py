"""lp norms, dual-norm linear maximization, and uniform lp-ball sampling.

Also provides the two convexity primitives used by the volumetric covering
argument: the two-uniform convexity gap and the half-ball event indicator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PExponent:
    """A finite exponent p >= 1 together with its Hoelder dual p* = p/(p-1)."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p < 1:
            raise InvalidInputError(f"p must be a finite real >= 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def dual(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    def __float__(self) -> float:
        return self.p


def as_p(p) -> float:
    """Normalize a PExponent or plain number to a float exponent."""
    value = float(p)
    if value < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    return value


def dual_exponent(p) -> float:
    return PExponent(as_p(p)).dual


def lp_norm(v, p) -> float:
    """The lp norm; ``p`` may be math.inf for the max norm."""
    vec = np.abs(np.asarray(v, dtype=np.float64))
    if vec.size == 0:
        return 0.0
    pv = float(p)
    if math.isinf(pv):
        return float(vec.max())
    if pv < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    if pv == 1.0:
        return float(vec.sum())
    if pv == 2.0:
        return float(np.linalg.norm(vec))
    m = float(vec.max())
    if m == 0.0:
        return 0.0
    # factor out the max to avoid overflow for large p
    return m * float(np.sum((vec / m) ** pv)) ** (1.0 / pv)


def linear_maximizer(c, p):
    """Exact maximizer of <c, x> over the unit lp ball.

    Returns ``(x, value)`` with value = ||c||_{p*}. For p = 1 the maximizer is
    a signed basis vector at the smallest index attaining max|c_j|
    (deterministic tie-break); c = 0 returns (e_1, 0).
    """
    vec = np.asarray(c, dtype=np.float64)
    pv = as_p(p)
    x = np.zeros_like(vec)
    if not np.any(vec):
        x[0] = 1.0
        return x, 0.0
    if pv == 1.0:
        j = int(np.argmax(np.abs(vec)))
        x[j] = math.copysign(1.0, vec[j])
        return x, float(np.abs(vec).max())
    q = pv / (pv - 1.0)
    value = lp_norm(vec, q)
    x = np.sign(vec) * np.abs(vec) ** (1.0 / (pv - 1.0)) / value ** (q - 1.0)
    return x, value


def sample_ball(d: int, p, rng: np.random.Generator):
    """One point uniformly distributed in the unit lp ball of R^d.

    Uses the generalized-Gaussian construction: signed Gamma(1/p)^{1/p}
    coordinates normalized by (sum |s_i|^p + W)^{1/p} with W ~ Exp(1).
    """
    return sample_ball_batch(d, p, 1, rng)[0]


def sample_ball_batch(d: int, p, n: int, rng: np.random.Generator):
    """``n`` independent uniform points in the unit lp ball, as an (n, d) array."""
    if d < 1:
        raise InvalidInputError("d must be >= 1")
    pv = as_p(p)
    g = rng.gamma(1.0 / pv, 1.0, size=(n, d)) ** (1.0 / pv)
    signs = rng.integers(0, 2, size=(n, d)) * 2.0 - 1.0
    s = signs * g
    w = rng.exponential(1.0, size=(n, 1))
    radius = (np.sum(np.abs(s) ** pv, axis=1, keepdims=True) + w) ** (1.0 / pv)
    return s / radius


def convexity_gap(x, y, p) -> float:
    """Slack in the two-uniform convexity inequality for p >= 2.

    Returns ||x||_p^2 + (p-1) ||y||_p^2
    - ((||x-y||_p^p + ||x+y||_p^p) / 2)^{2/p}, which is nonnegative;
    p = 2 gives exactly 0 (parallelogram law).
    """
    pv = as_p(p)
    if pv < 2:
        raise InvalidInputError(f"convexity gap requires p >= 2, got {p}")
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    lhs = lp_norm(xv, pv) ** 2 + (pv - 1.0) * lp_norm(yv, pv) ** 2
    mean_pow = 0.5 * (lp_norm(xv - yv, pv) ** pv + lp_norm(xv + yv, pv) ** pv)
    return lhs - mean_pow ** (2.0 / pv)


def half_ball_indicator(x, t: float, b, p) -> bool:
    """True iff ||x + t b||_p <= sqrt(t^2 + p - 1).

    For x and b in the unit lp ball (p >= 2) this event has probability at
    least 1/2 under b uniform in the ball.
    """
    pv = as_p(p)
    if t <= 0:
        raise InvalidInputError("t must be positive")
    xv = np.asarray(x, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    return lp_norm(xv + t * bv, pv) <= math.sqrt(t * t + pv - 1.0)
