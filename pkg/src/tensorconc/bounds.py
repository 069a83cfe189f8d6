"""Closed-form evaluators for the concentration upper bounds.

Every evaluator takes an explicit constant C (default 1) in place of the
suppressed order/exponent-dependent constants, and uses log(d + 1)
uniformly so the d = 1 edge case stays finite. Values scale linearly in C;
scaling behaviour, not absolute constants, is what the experiment suite
checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .lp import as_p, lp_norm
from .models import Hypergraph, adjacency_tensor, delta_vector
from .norms import SolverConfig, best_available_norm
from .tensor import Tensor, contract
from .variance import VarianceProfile

_BOUND_NAMES = (
    "master",
    "sharpest",
    "type2",
    "trivial",
    "indep_entry",
    "hypergraph",
    "matching",
    "nck_holder",
    "lambda_threshold",
)


@dataclass(frozen=True)
class BoundReport:
    """A bound value together with the constant and inputs that produced it."""

    name: str
    value: float
    constant_used: float
    inputs: dict

    def __post_init__(self):
        if self.name not in _BOUND_NAMES:
            raise InvalidInputError(f"unknown bound name {self.name!r}")

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "constant_used": self.constant_used,
            "inputs": self.inputs,
        }


def _logd(d: int) -> float:
    return math.log(d + 1)


def _max_interpolated_term(sigma, r: int) -> float:
    """max over 2 <= q <= r of sigma_q^{1/q} sigma_0^{(q-1)/q}."""
    s0 = sigma[0]
    best = 0.0
    for q in range(2, r + 1):
        best = max(best, sigma[q] ** (1.0 / q) * s0 ** ((q - 1.0) / q))
    return best


def master_bound(prof: VarianceProfile, d: int, r: int, p, c: float = 1.0) -> BoundReport:
    """C d^{1/2-1/p} ( log(d+1) sigma_1 + max_q sigma_q^{1/q} sigma_0^{(q-1)/q} )."""
    pv = as_p(p)
    if prof.order != r:
        raise InvalidInputError(f"profile order {prof.order} does not match r={r}")
    value = c * d ** (0.5 - 1.0 / pv) * (
        _logd(d) * prof.sigma[1] + _max_interpolated_term(prof.sigma, r)
    )
    return BoundReport("master", value, c, {"d": d, "r": r, "p": pv, "sigma": list(prof.sigma)})


def sharpest_bound(prof: VarianceProfile, d: int, r: int, p, c: float = 1.0) -> BoundReport:
    """Same shape as the master bound with the explicit sqrt(p) factor."""
    pv = as_p(p)
    if prof.order != r:
        raise InvalidInputError(f"profile order {prof.order} does not match r={r}")
    value = c * math.sqrt(pv) * d ** (0.5 - 1.0 / pv) * (
        _logd(d) * prof.sigma[1] + _max_interpolated_term(prof.sigma, r)
    )
    return BoundReport("sharpest", value, c, {"d": d, "r": r, "p": pv, "sigma": list(prof.sigma)})


def type2_bound(prof: VarianceProfile, d: int, r: int, p, c: float = 1.0) -> BoundReport:
    """C sqrt(p) log(d+1) d^{1/2 - min(1/p, 1/2r)} sigma_T2."""
    pv = as_p(p)
    value = (
        c
        * math.sqrt(pv)
        * _logd(d)
        * d ** (0.5 - min(1.0 / pv, 1.0 / (2 * r)))
        * prof.sigma_type2
    )
    return BoundReport(
        "type2", value, c, {"d": d, "r": r, "p": pv, "sigma_type2": prof.sigma_type2}
    )


def trivial_bound(prof: VarianceProfile, d: int, c: float = 1.0) -> BoundReport:
    """C sqrt(d) sigma_0, the Slepian-route bound."""
    value = c * math.sqrt(d) * prof.sigma[0]
    return BoundReport("trivial", value, c, {"d": d, "sigma0": prof.sigma[0]})


def indep_entry_bound(
    a: Tensor, p, c: float = 1.0, cfg: SolverConfig | None = None
) -> BoundReport:
    """Independent-entry bound from the variance tensor A.

    C d^{1/2-1/p} ( log(d+1) ||A 1||_{p/2}^{1/2}
    + max_q ||A 1^{x q}||_{p/2}^{1/(2q)} ||A||_{p/2}^{(q-1)/(2q)} ),
    where the inner norms are injective norms at exponent p/2 (so p >= 2) and
    A 1^{x q} contracts q slots with the all-ones vector.
    """
    pv = as_p(p)
    if pv < 2:
        raise InvalidInputError("independent-entry bound requires p >= 2")
    if np.any(a.array < 0):
        raise InvalidInputError("variance tensor must be entrywise nonnegative")
    cfg = cfg or SolverConfig()
    d, r = a.dim, a.order
    half = pv / 2.0
    ones = np.ones(d)

    def inner_norm(t: Tensor) -> float:
        value, _ = best_available_norm(t, half, cfg)
        return value

    term_log = _logd(d) * inner_norm(contract(a, ones, 1)) ** 0.5
    norm_a = inner_norm(a)
    term_max = 0.0
    for q in range(2, r + 1):
        nq = inner_norm(contract(a, ones, q))
        term_max = max(term_max, nq ** (1.0 / (2 * q)) * norm_a ** ((q - 1.0) / (2 * q)))
    value = c * d ** (0.5 - 1.0 / pv) * (term_log + term_max)
    return BoundReport("indep_entry", value, c, {"d": d, "r": r, "p": pv})


def hypergraph_bound(delta, d: int, r: int, c: float = 1.0) -> BoundReport:
    """C ( log(d+1) Delta_{r-1}^{1/2} + max_q Delta_{r-q}^{1/(2q)} ), the p=2 form."""
    dv = [float(x) for x in delta]
    if len(dv) != r + 1:
        raise InvalidInputError(f"need Delta indexed 0..{r}, got {len(dv)} entries")
    term_max = max(dv[r - q] ** (1.0 / (2 * q)) for q in range(2, r + 1))
    value = c * (_logd(d) * dv[r - 1] ** 0.5 + term_max)
    return BoundReport("hypergraph", value, c, {"d": d, "r": r, "delta": dv})


def lambda_threshold(
    h: Hypergraph, c: float = 1.0, cfg: SolverConfig | None = None
) -> BoundReport:
    """Detection threshold C * hypergraph_bound / ||A||_{I_2}.

    The norm in the denominator is the certified lower-bound estimate (exact
    for r = 2), which can only push the threshold upward, i.e. the reported
    lambda is conservative.
    """
    cfg = cfg or SolverConfig()
    hb = hypergraph_bound(delta_vector(h), h.d, h.r, 1.0)
    norm_a, method = best_available_norm(adjacency_tensor(h), 2.0, cfg)
    if norm_a == 0.0:
        raise InvalidInputError("hypergraph has no edges; threshold undefined")
    value = c * hb.value / norm_a
    return BoundReport(
        "lambda_threshold",
        value,
        c,
        {"d": h.d, "r": h.r, "norm_A": norm_a, "norm_method": method, "hb": hb.value},
    )


def matching_bound(mu, delta, d: int, p, c: float = 1.0) -> BoundReport:
    """Matching-series bound for p >= 4.

    C d^{1/2-1/p} log(d+1) ||mu||_1^{1/4} ||Delta||_inf^{1/p}
    ||mu||_{(2p-4)/(p-4)}^{1/2-1/p}; at p = 4 the inner exponent is taken as
    infinity (the max norm of mu).
    """
    pv = as_p(p)
    if pv < 4:
        raise InvalidInputError("matching bound requires p >= 4")
    mu_v = np.asarray(mu, dtype=np.float64)
    delta_v = np.asarray(delta, dtype=np.float64)
    inner_exp = math.inf if pv == 4.0 else (2 * pv - 4.0) / (pv - 4.0)
    value = (
        c
        * d ** (0.5 - 1.0 / pv)
        * _logd(d)
        * lp_norm(mu_v, 1) ** 0.25
        * lp_norm(delta_v, math.inf) ** (1.0 / pv)
        * lp_norm(mu_v, inner_exp) ** (0.5 - 1.0 / pv)
    )
    return BoundReport("matching", value, c, {"d": d, "p": pv})


def nck_holder_bound(
    d: int,
    p,
    c: float = 1.0,
    delta=None,
    series=None,
    cfg: SolverConfig | None = None,
) -> BoundReport:
    """Khintchine-plus-Hoelder comparison bound for matrix series.

    With degree statistics: C sqrt(log(d+1)) d^{1-2/p} ||Delta||_inf^{1/2}
    (for matchings ||Delta||_inf^{1/2} is exactly the Euclidean sigma_1, so
    at p = 2 this is the classical sqrt(log d) sigma_1 form). With an
    explicit matrix series: the cruder C sqrt(log(d+1)) d^{1-2/p}
    sqrt(sum_k ||A_k||_{I_2}^2).
    """
    pv = as_p(p)
    if (delta is None) == (series is None):
        raise InvalidInputError("provide exactly one of delta or series")
    prefix = c * math.sqrt(_logd(d)) * d ** (1.0 - 2.0 / pv)
    if delta is not None:
        value = prefix * lp_norm(np.asarray(delta, dtype=np.float64), math.inf) ** 0.5
        return BoundReport("nck_holder", value, c, {"d": d, "p": pv, "mode": "delta"})
    if series.order != 2:
        raise InvalidInputError("the comparison bound applies to matrix series only")
    cfg = cfg or SolverConfig()
    total = 0.0
    for t in series:
        value, _ = best_available_norm(t, 2.0, cfg)
        total += value * value
    value = prefix * math.sqrt(total)
    return BoundReport("nck_holder", value, c, {"d": d, "p": pv, "mode": "series"})
