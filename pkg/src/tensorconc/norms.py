"""Certified lower-bound estimation of injective lp norms, plus exact oracles.

The main estimator is alternating dual-norm maximization: cycling through
slots, each update solves the linear subproblem over the lp ball exactly, so
the objective is monotone and every returned value is certified by witness
vectors. Exact oracles cover the cases that admit them: p = 1 (max entry),
symmetric matrices at p = 2 (Jacobi eigenvalues), and tiny instances (grid
search over discretized lp spheres).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .lp import as_p, dual_exponent, linear_maximizer, lp_norm, sample_ball
from .seeds import generator, mix
from .tensor import Tensor, apply_form, is_symmetric

_METHODS = ("alternating", "power_symmetric", "grid_oracle", "spectral_exact", "l1_exact")


@dataclass(frozen=True)
class SolverConfig:
    """Multi-start solver settings.

    ``restarts=None`` resolves to the default schedule 8 * order *
    ceil(sqrt(dim)). The restart schedule is derived deterministically from
    ``seed``, so results are exactly reproducible and schedule-independent.
    """

    restarts: int | None = None
    max_iters: int = 500
    rel_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")
        if self.max_iters < 1:
            raise InvalidInputError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise InvalidInputError("rel_tol must be positive")

    def resolved_restarts(self, order: int, dim: int) -> int:
        if self.restarts is not None:
            return self.restarts
        return 8 * max(order, 1) * math.ceil(math.sqrt(max(dim, 1)))

    def to_json_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SolverConfig":
        known = {k: obj[k] for k in ("restarts", "max_iters", "rel_tol", "seed") if k in obj}
        return cls(**known)


@dataclass(frozen=True)
class NormEstimate:
    """A certified lower bound on an injective norm.

    ``value`` always equals the multilinear form re-evaluated at
    ``witnesses`` (absolute value for the symmetric form), and each witness
    lies in the unit lp ball, so the estimate is a certificate.
    """

    value: float
    witnesses: tuple
    restarts_used: int
    iterations: int
    converged: bool
    method: str

    def __post_init__(self):
        if self.method not in _METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}")

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "witnesses": [list(map(float, w)) for w in self.witnesses],
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
            "method": self.method,
        }


def _contract_leaving(arr: np.ndarray, witnesses, free_slot: int) -> np.ndarray:
    # Contract axes in descending order so remaining axis positions stay put.
    out = arr
    for k in range(arr.ndim - 1, -1, -1):
        if k == free_slot:
            continue
        out = np.tensordot(out, witnesses[k], axes=([k], [0]))
    return out


def _basis_start(t: Tensor) -> list:
    flat = int(np.argmax(np.abs(t.array)))
    idx = np.unravel_index(flat, t.array.shape)
    starts = []
    for i in idx:
        e = np.zeros(t.dim)
        e[i] = 1.0
        starts.append(e)
    return starts


def injective_norm(t: Tensor, p, cfg: SolverConfig, extra_starts=None) -> NormEstimate:
    """Alternating maximization of <T, x_1 x ... x x_r> over lp balls.

    Each slot update is an exact linear maximization against the contraction
    of T with the other current witnesses, so the objective never decreases.
    The best value over all restarts (random ball starts plus one
    deterministic start at the basis vectors of the largest-magnitude entry)
    is returned; it is a lower bound on the true norm. ``extra_starts`` may
    supply additional witness tuples to seed from.
    """
    pv = as_p(p)
    if not math.isfinite(pv):
        raise InvalidInputError("norm estimation requires finite p")
    r, d = t.order, t.dim
    if r == 0:
        return NormEstimate(abs(t.item()), (), 0, 0, True, "alternating")
    if not np.any(t.array):
        e1 = np.zeros(d)
        e1[0] = 1.0
        return NormEstimate(0.0, (e1,) * r, 0, 0, True, "alternating")

    restarts = cfg.resolved_restarts(r, d)
    starts = [_basis_start(t)]
    for j in range(restarts):
        rng = generator(mix(cfg.seed, j))
        starts.append([sample_ball(d, pv, rng) for _ in range(r)])
    for ws in extra_starts or []:
        starts.append([np.asarray(w, dtype=np.float64) for w in ws])

    best = None
    for witnesses in starts:
        ws = [w.copy() for w in witnesses]
        value = apply_form(t, ws)
        converged = False
        iters = 0
        for iters in range(1, cfg.max_iters + 1):
            prev = value
            for j in range(r):
                c = _contract_leaving(t.array, ws, j)
                if not np.any(c):
                    continue
                x, val = linear_maximizer(c, pv)
                ws[j] = x
                value = val
            if value < prev - 1e-9 * max(abs(prev), 1.0):
                raise RuntimeError("alternating objective decreased; solver bug")
            if value - prev <= cfg.rel_tol * max(abs(value), 1e-300):
                converged = True
                break
        if best is None or value > best[0]:
            best = (value, ws, iters, converged)

    value, ws, iters, converged = best
    certified = apply_form(t, ws)
    return NormEstimate(certified, tuple(ws), len(starts), iters, converged, "alternating")


def symmetric_injective_norm(t: Tensor, p, cfg: SolverConfig) -> NormEstimate:
    """Estimate sup over the lp ball of |T[u, ..., u]| for symmetric T.

    Higher-order power iteration on the lp ball: each step first tries the
    exact maximizer of the linearization <contract(T, u, r-1), x>; when that
    jump stalls (it cannot make progress on sign-degenerate spectra, e.g.
    block dilations), a backtracked projected-gradient step along
    sign(T[u..u]) * contract(T, u, r-1) keeps the objective strictly
    increasing. Best witness over restarts, certified lower bound.
    """
    pv = as_p(p)
    if not math.isfinite(pv):
        raise InvalidInputError("norm estimation requires finite p")
    scale = float(np.max(np.abs(t.array))) if t.array.size else 0.0
    if not is_symmetric(t, tol=1e-10 * scale):
        raise InvalidInputError("symmetric_injective_norm requires a symmetric tensor")
    r, d = t.order, t.dim
    if r == 0:
        return NormEstimate(abs(t.item()), (), 0, 0, True, "power_symmetric")
    if not np.any(t.array):
        e1 = np.zeros(d)
        e1[0] = 1.0
        return NormEstimate(0.0, (e1,), 0, 0, True, "power_symmetric")

    restarts = cfg.resolved_restarts(r, d)
    starts = [_basis_start(t)[0]]
    for j in range(restarts):
        rng = generator(mix(cfg.seed, j))
        starts.append(sample_ball(d, pv, rng))

    def objective(u):
        return apply_form(t, [u] * r)

    def ascend_euclidean(u0, sign):
        # Shifted iteration: sign * T[u..u] + gamma ||u||_2^2 is convex on the
        # Euclidean ball for gamma >= r(r-1)/2 ||T||_F, so the exact linear
        # step u <- normalize(sign * c + gamma' u) is monotone even on
        # sign-degenerate spectra (e.g. block dilations).
        gamma = 0.55 * r * max(r - 1, 1) * float(np.linalg.norm(t.array)) + 1e-300
        u = u0.copy()
        val = sign * objective(u)
        iters = 0
        converged = False
        for iters in range(1, cfg.max_iters + 1):
            prev = val
            c = _contract_leaving(t.array, [u] * r, 0)
            direction = sign * r * c + 2.0 * gamma * u
            norm_dir = float(np.linalg.norm(direction))
            if norm_dir == 0.0:
                converged = True
                break
            u = direction / norm_dir
            val = sign * objective(u)
            if val - prev <= cfg.rel_tol * max(abs(val), 1e-300):
                converged = True
                break
        return val, u, iters, converged

    def ascend_lp(u0):
        # Jump to the exact linearization maximizer when it helps; otherwise
        # fall back to a backtracked projected-gradient step, which keeps
        # |T[u..u]| strictly increasing.
        u = u0.copy()
        val = abs(objective(u))
        iters = 0
        converged = False
        for iters in range(1, cfg.max_iters + 1):
            prev = val
            c = _contract_leaving(t.array, [u] * r, 0)
            if not np.any(c):
                converged = True
                break
            sign = 1.0 if objective(u) >= 0 else -1.0
            jump, _ = linear_maximizer(c, pv)
            jump_val = abs(objective(jump))
            if jump_val > val:
                u, val = jump, jump_val
            else:
                eta = 1.0
                for _ in range(60):
                    cand = u + eta * sign * c
                    norm_c = lp_norm(cand, pv)
                    if norm_c > 1.0:
                        cand = cand / norm_c
                    cand_val = abs(objective(cand))
                    if cand_val > val:
                        u, val = cand, cand_val
                        break
                    eta *= 0.5
            if val <= prev or val - prev <= cfg.rel_tol * max(val, 1e-300):
                converged = True
                break
        return val, u, iters, converged

    best = None
    for u0 in starts:
        if pv == 2.0:
            signs = (1.0, -1.0) if r % 2 == 0 else (1.0,)
            for sign in signs:
                val, u, iters, converged = ascend_euclidean(u0, sign)
                if best is None or val > best[0]:
                    best = (val, u, iters, converged)
        else:
            val, u, iters, converged = ascend_lp(u0)
            if best is None or val > best[0]:
                best = (val, u, iters, converged)

    value, u, iters, converged = best
    certified = abs(apply_form(t, [u] * r))
    return NormEstimate(certified, (u,), len(starts), iters, converged, "power_symmetric")


def l1_injective_exact(t: Tensor) -> float:
    """Exact injective l1 norm: the maximum absolute entry."""
    if t.array.size == 0:
        return 0.0
    return float(np.max(np.abs(t.array)))


def _jacobi_eigenvalues(m: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    a = np.array(m, dtype=np.float64)
    n = a.shape[0]
    fro = float(np.linalg.norm(a))
    if fro == 0.0 or n == 1:
        return np.diag(a).copy()
    target = rel_tol * fro
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off < target:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                # entries below the sweep target contribute nothing; skipping
                # them also keeps tau finite
                if abs(a[i, j]) <= target / (n * n):
                    continue
                tau = (a[j, j] - a[i, i]) / (2.0 * a[i, j])
                if abs(tau) > 1e150:  # sqrt(1 + tau^2) would overflow
                    tt = 0.5 / tau
                else:
                    tt = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + tt * tt)
                s = tt * c
                rot_i = c * a[:, i] - s * a[:, j]
                rot_j = s * a[:, i] + c * a[:, j]
                a[:, i], a[:, j] = rot_i, rot_j
                rot_i = c * a[i, :] - s * a[j, :]
                rot_j = s * a[i, :] + c * a[j, :]
                a[i, :], a[j, :] = rot_i, rot_j
    return np.diag(a).copy()


def spectral_exact(t: Tensor) -> float:
    """Largest absolute eigenvalue of a symmetric matrix (exact r=2, p=2 oracle)."""
    if t.order != 2:
        raise InvalidInputError("spectral_exact requires an order-2 tensor")
    scale = float(np.max(np.abs(t.array))) if t.array.size else 0.0
    if not is_symmetric(t, tol=1e-10 * scale):
        raise InvalidInputError("spectral_exact requires a symmetric matrix")
    eigs = _jacobi_eigenvalues(t.array)
    return float(np.max(np.abs(eigs)))


def _sphere_grid(d: int, p: float, resolution: int) -> np.ndarray:
    """Points on the lp unit sphere in R^d from an angular grid."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        theta = 2.0 * math.pi * np.arange(resolution) / resolution
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif d == 3:
        theta = math.pi * np.arange(resolution) / max(resolution - 1, 1)
        phi = 2.0 * math.pi * np.arange(resolution) / resolution
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        pts = np.stack(
            [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
        ).reshape(-1, 3)
    else:
        raise InvalidInputError("grid oracle supports d <= 3 only")
    norms = np.sum(np.abs(pts) ** p, axis=1) ** (1.0 / p)
    norms[norms == 0.0] = 1.0
    return pts / norms[:, None]


def grid_oracle(t: Tensor, p, resolution: int = 200) -> float:
    """Brute-force lower bound on the injective norm for tiny tensors.

    Enumerates an angular grid on the lp sphere for the first r-1 slots and
    solves the last slot exactly by the dual norm; accuracy improves like
    O(r * Lip / resolution). Limits: d <= 3, r <= 3, resolution <= 400.
    """
    pv = as_p(p)
    r, d = t.order, t.dim
    if d > 3 or r > 3:
        raise ResourceLimitError("grid oracle limited to d <= 3, r <= 3")
    if not 1 <= resolution <= 400:
        raise InvalidInputError("resolution must be in 1..400")
    if r == 0:
        return abs(t.item())
    q = dual_exponent(pv)

    def dual_norms(rows: np.ndarray) -> np.ndarray:
        if math.isinf(q):
            return np.max(np.abs(rows), axis=-1)
        return np.sum(np.abs(rows) ** q, axis=-1) ** (1.0 / q)

    if r == 1:
        return float(lp_norm(t.array, q))
    grid = _sphere_grid(d, pv, resolution)
    if r == 2:
        rows = grid @ t.array
        return float(np.max(dual_norms(rows)))
    best = 0.0
    for g1 in grid:
        slab = np.tensordot(t.array, g1, axes=([0], [0]))  # (d, d), slot-1 fixed
        rows = grid @ slab
        best = max(best, float(np.max(dual_norms(rows))))
    return best


def best_available_norm(t: Tensor, p, cfg: SolverConfig):
    """Norm value via the sharpest applicable route.

    Returns ``(value, method)``: the exact max-entry oracle at p=1, the
    Jacobi eigenvalue oracle for symmetric matrices at p=2, and the
    alternating estimator otherwise (a lower bound).
    """
    pv = as_p(p)
    if t.order == 0:
        return abs(t.item()), "l1_exact"
    if pv == 1.0:
        return l1_injective_exact(t), "l1_exact"
    if pv == 2.0 and t.order == 2:
        scale = float(np.max(np.abs(t.array))) if t.array.size else 0.0
        if is_symmetric(t, tol=1e-10 * scale):
            return spectral_exact(t), "spectral_exact"
    return injective_norm(t, pv, cfg).value, "alternating"
