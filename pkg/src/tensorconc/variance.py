"""Variance parameters of Gaussian tensor series and the natural distance.

For a series T = sum_k g_k T_k the parameter sigma_q is the square root of
the injective norm of sum_k (T_k star_q T_k); sigma_0 generalizes the weak
variance and sigma_1 the noncommutative-Khintchine variance. The type-2
variance is the root sum of squared injective norms of the terms. Both the
direct (star-sum) route and the sup-of-contracted-slices route are
implemented; the two agree on symmetric series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .lp import as_p, sample_ball
from .norms import SolverConfig, best_available_norm
from .seeds import generator, mix
from .tensor import (
    MAX_ENTRIES,
    Tensor,
    TensorSeries,
    apply_form,
    inner,
    is_symmetric,
    star,
)

TAG_EXACT = "exact"
TAG_ESTIMATED = "estimated-lower-bound"


@dataclass(frozen=True)
class VarianceProfile:
    """All sigma_q values for q = 0..r plus the type-2 variance.

    ``method_tags[q]`` records whether sigma[q] came from an exact oracle or
    from the lower-bound estimator.
    """

    p: float
    sigma: tuple
    sigma_type2: float
    method_tags: tuple

    def __post_init__(self):
        if len(self.sigma) != len(self.method_tags):
            raise InvalidInputError("sigma and method_tags must align")

    @property
    def order(self) -> int:
        return len(self.sigma) - 1

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "sigma": list(self.sigma),
            "sigma_type2": self.sigma_type2,
            "method_tags": list(self.method_tags),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "VarianceProfile":
        try:
            return cls(
                p=float(obj["p"]),
                sigma=tuple(float(s) for s in obj["sigma"]),
                sigma_type2=float(obj["sigma_type2"]),
                method_tags=tuple(obj["method_tags"]),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed variance profile: {exc}") from exc


def star_sum(series: TensorSeries, q: int) -> Tensor:
    """sum_k T_k star_q T_k as a dense order 2(r-q) tensor."""
    acc = None
    for t in series:
        s = star(t, t, q)
        acc = s if acc is None else Tensor(s.order, s.dim, acc.array + s.array)
    return acc


def _sigma_q_direct_with_method(series: TensorSeries, q: int, p, cfg: SolverConfig):
    r = series.order
    if not 0 <= q <= r:
        raise InvalidInputError(f"q={q} out of range for order {r}")
    pv = as_p(p)
    if q == r:
        return math.sqrt(sum(inner(t, t) for t in series)), "frobenius_exact"
    m = star_sum(series, q)
    value, method = best_available_norm(m, pv, cfg)
    return math.sqrt(max(value, 0.0)), method


def sigma_q_direct(series: TensorSeries, q: int, p, cfg: SolverConfig) -> float:
    """sigma_q via the injective norm of the star-sum tensor.

    Exact for q = r (the star-sum collapses to sum_k ||T_k||_F^2) and for
    the oracle cases of the norm router; otherwise a lower-bound estimate.
    """
    value, _ = _sigma_q_direct_with_method(series, q, p, cfg)
    return value


def _slot_matrices(series: TensorSeries, us: list, free_slot: int, q: int) -> list:
    """For each term, T_k contracted with the other free vectors, leaving
    ``free_slot`` and the trailing q slots open, reshaped to (d, d^q)."""
    mats = []
    for t in series:
        arr = t.array
        r = t.order
        # contract the other free slots in descending order
        for k in range(r - q - 1, -1, -1):
            if k == free_slot:
                continue
            arr = np.tensordot(arr, us[k], axes=([k], [0]))
        mats.append(arr.reshape(t.dim, -1))
    return mats


def _sup_objective(series: TensorSeries, us: list, q: int) -> float:
    total = 0.0
    for t in series:
        arr = t.array
        for k in range(t.order - q - 1, -1, -1):
            arr = np.tensordot(arr, us[k], axes=([k], [0]))
        total += float(np.sum(arr * arr))
    return total


def _maximize_quadratic_on_ball(quad: np.ndarray, u0: np.ndarray, p: float, cfg: SolverConfig):
    """Maximize u^T Q u (Q PSD) over the lp ball.

    Projected gradient ascent with backtracking, preceded each round by the
    exact maximizer of the linearized objective (monotone for PSD Q), which
    escapes the shallow basins plain gradient steps can stall in.
    """
    from .lp import linear_maximizer

    u = u0.copy()
    norm_u = np.sum(np.abs(u) ** p) ** (1.0 / p)
    if norm_u > 1.0:
        u = u / norm_u
    val = float(u @ quad @ u)
    step = 1.0 / (float(np.linalg.norm(quad)) + 1e-30)
    for _ in range(cfg.max_iters):
        grad = 2.0 * (quad @ u)
        improved = False
        if np.any(grad):
            jump, _ = linear_maximizer(grad, p)
            jump_val = float(jump @ quad @ jump)
            if jump_val > val:
                u, val = jump, jump_val
                improved = True
        if not improved:
            eta = step
            for _ in range(40):
                cand = u + eta * grad
                norm_c = np.sum(np.abs(cand) ** p) ** (1.0 / p)
                if norm_c > 1.0:
                    cand = cand / norm_c
                cand_val = float(cand @ quad @ cand)
                if cand_val > val:
                    u, val = cand, cand_val
                    improved = True
                    break
                eta *= 0.5
        if not improved:
            break
    return u, val


def sigma_q_sup(series: TensorSeries, q: int, p, cfg: SolverConfig) -> float:
    """sigma_q via the maximized sum of squared Frobenius norms of slices.

    Alternating ascent over the r-q free ball vectors; each slot update is
    projected gradient ascent with backtracking on the induced quadratic
    form. Lower-bound estimate; equals sigma_q_direct exactly at q = r.
    """
    r, d = series.order, series.dim
    if not 0 <= q <= r:
        raise InvalidInputError(f"q={q} out of range for order {r}")
    for t in series:
        scale = float(np.max(np.abs(t.array))) if t.array.size else 0.0
        if not is_symmetric(t, tol=1e-10 * scale):
            raise InvalidInputError("sigma_q_sup requires symmetric series terms")
    pv = as_p(p)
    free = r - q
    if free == 0:
        return math.sqrt(sum(inner(t, t) for t in series))

    restarts = cfg.resolved_restarts(r, d)
    best = 0.0
    for j in range(restarts + 1):
        if j == 0:
            us = [np.eye(d)[0].copy() for _ in range(free)]
        else:
            rng = generator(mix(cfg.seed, 7 * j + 1))
            us = [sample_ball(d, pv, rng) for _ in range(free)]
        val = _sup_objective(series, us, q)
        for _ in range(cfg.max_iters):
            prev = val
            for slot in range(free):
                mats = _slot_matrices(series, us, slot, q)
                quad = np.zeros((d, d))
                for m in mats:
                    quad += m @ m.T
                us[slot], val = _maximize_quadratic_on_ball(quad, us[slot], pv, cfg)
            if val - prev <= cfg.rel_tol * max(val, 1e-300):
                break
        best = max(best, val)
    return math.sqrt(best)


def type2_variance(series: TensorSeries, p, cfg: SolverConfig) -> float:
    """Root sum of squared injective norms of the series terms."""
    pv = as_p(p)
    total = 0.0
    for t in series:
        value, _ = best_available_norm(t, pv, cfg)
        total += value * value
    return math.sqrt(total)


def natural_distance(series: TensorSeries, u, v) -> float:
    """Semi-metric of the Gaussian process x -> <T, x^{x r}>.

    d(u, v) = sqrt(sum_k (<T_k, u^{x r}> - <T_k, v^{x r}>)^2); requires
    symmetric terms.
    """
    for t in series:
        scale = float(np.max(np.abs(t.array))) if t.array.size else 0.0
        if not is_symmetric(t, tol=1e-10 * scale):
            raise InvalidInputError("natural_distance requires symmetric series terms")
    uv = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    total = 0.0
    for t in series:
        diff = apply_form(t, [uv] * t.order) - apply_form(t, [vv] * t.order)
        total += diff * diff
    return math.sqrt(total)


def process_features(series: TensorSeries, points: np.ndarray) -> np.ndarray:
    """Rows of <T_k, x^{x r}> per point; natural distances become Euclidean."""
    feats = np.empty((points.shape[0], len(series)))
    for i, x in enumerate(points):
        for k, t in enumerate(series):
            feats[i, k] = apply_form(t, [x] * t.order)
    return feats


def sigma_frobenius_upper(series: TensorSeries, q: int, p) -> float:
    """Exact upper bound on sigma_q from Frobenius norms.

    sigma_q^2 <= d^{2(r-q)(1/2-1/p)} * sum_k ||T_k||_F^2 for p >= 2: each of
    the 2(r-q) free lp-ball slots costs a Hoelder factor d^{1/2-1/p} when
    passed to the Euclidean ball, and the Euclidean injective norm is at most
    the Frobenius norm. Reduces to sqrt(sum ||T_k||_F^2) at q = r or p = 2.
    """
    pv = as_p(p)
    if pv < 2:
        raise InvalidInputError("the Frobenius surrogate requires p >= 2")
    r, d = series.order, series.dim
    if not 0 <= q <= r:
        raise InvalidInputError(f"q={q} out of range for order {r}")
    fro2 = sum(inner(t, t) for t in series)
    return d ** ((r - q) * (0.5 - 1.0 / pv)) * math.sqrt(fro2)


def variance_profile(series: TensorSeries, p, cfg: SolverConfig) -> VarianceProfile:
    """All sigma_q (direct route, exact oracles where available) and sigma_T2."""
    r, d = series.order, series.dim
    pv = as_p(p)
    sigma = []
    tags = []
    for q in range(r + 1):
        out_order = 2 * (r - q)
        if q == r or d**out_order <= MAX_ENTRIES:
            value, method = _sigma_q_direct_with_method(series, q, pv, cfg)
            exact = method in ("frobenius_exact", "l1_exact", "spectral_exact")
            tags.append(TAG_EXACT if exact else TAG_ESTIMATED)
        else:
            value = sigma_q_sup(series, q, pv, cfg)
            tags.append(TAG_ESTIMATED)
        sigma.append(value)
    t2 = type2_variance(series, pv, cfg)
    return VarianceProfile(p=pv, sigma=tuple(sigma), sigma_type2=t2, method_tags=tuple(tags))
