"""Generators for the random and deterministic tensor models.

Covers the i.i.d. symmetric Gaussian model, the nonhomogeneous
independent-entry model with a variance tensor, hypergraph adjacency
tensors with their intersection statistics, matching-matrix series, the
rank-one series, the censored-PCA observation, and the d-term series that
attains the type-2 lower bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .tensor import (
    Tensor,
    TensorSeries,
    _check_entry_budget,
    hadamard,
    outer,
    series_weighted_sum,
)


@dataclass(frozen=True)
class Hypergraph:
    """r-uniform hypergraph on vertices {1..d} with duplicate-free edges."""

    d: int
    r: int
    edges: tuple

    def __post_init__(self):
        if self.d < 1 or self.r < 1:
            raise InvalidInputError("d and r must be >= 1")
        seen = set()
        canon = []
        for edge in self.edges:
            tup = tuple(sorted(int(v) for v in edge))
            if len(tup) != self.r or len(set(tup)) != self.r:
                raise InvalidInputError(f"edge {edge} is not an r-subset with r={self.r}")
            if any(v < 1 or v > self.d for v in tup):
                raise InvalidInputError(f"edge {edge} has vertices outside 1..{self.d}")
            if tup in seen:
                raise InvalidInputError(f"duplicate edge {edge}")
            seen.add(tup)
            canon.append(tup)
        object.__setattr__(self, "edges", tuple(canon))

    def to_json_dict(self) -> dict:
        return {"d": self.d, "r": self.r, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Hypergraph":
        try:
            return cls(d=int(obj["d"]), r=int(obj["r"]), edges=tuple(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed hypergraph object: {exc}") from exc


def complete_hypergraph(d: int, r: int) -> Hypergraph:
    edges = tuple(itertools.combinations(range(1, d + 1), r))
    return Hypergraph(d=d, r=r, edges=edges)


def delta_j(h: Hypergraph, j: int) -> int:
    """Max number of edges whose joint intersection has at least j vertices.

    j = 0 counts all edges; for j >= 1 this equals the max over j-subsets of
    the number of edges containing the subset.
    """
    if not 0 <= j <= h.r:
        raise InvalidInputError(f"j={j} out of range 0..{h.r}")
    if j == 0:
        return len(h.edges)
    counts: dict = {}
    for edge in h.edges:
        for sub in itertools.combinations(edge, j):
            counts[sub] = counts.get(sub, 0) + 1
    return max(counts.values(), default=0)


def delta_vector(h: Hypergraph) -> list:
    """[delta_0, ..., delta_r]."""
    return [delta_j(h, j) for j in range(h.r + 1)]


def adjacency_tensor(h: Hypergraph) -> Tensor:
    """0/1 tensor with ones at every permutation of every edge."""
    _check_entry_budget(h.d, h.r)
    arr = np.zeros((h.d,) * h.r)
    for edge in h.edges:
        idx0 = [v - 1 for v in edge]
        for perm in itertools.permutations(idx0):
            arr[perm] = 1.0
    return Tensor(order=h.r, dim=h.d, array=arr)


@dataclass(frozen=True)
class MatchingFamily:
    """A family of matchings (disjoint unordered vertex pairs) on {1..d}."""

    d: int
    matchings: tuple

    def __post_init__(self):
        if self.d < 2:
            raise InvalidInputError("d must be >= 2")
        canon = []
        for m in self.matchings:
            pairs = []
            used = set()
            for pair in m:
                a, b = sorted(int(v) for v in pair)
                if a == b:
                    raise InvalidInputError(f"pair {pair} is a loop")
                if a < 1 or b > self.d:
                    raise InvalidInputError(f"pair {pair} outside 1..{self.d}")
                if a in used or b in used:
                    raise InvalidInputError(f"pair {pair} overlaps another pair in its matching")
                used.update((a, b))
                pairs.append((a, b))
            canon.append(tuple(sorted(pairs)))
        object.__setattr__(self, "matchings", tuple(canon))

    def to_json_dict(self) -> dict:
        return {"d": self.d, "matchings": [[list(p) for p in m] for m in self.matchings]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MatchingFamily":
        try:
            return cls(
                d=int(obj["d"]),
                matchings=tuple(tuple(tuple(p) for p in m) for m in obj["matchings"]),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed matching family: {exc}") from exc


def matching_series(family: MatchingFamily):
    """Adjacency-matrix series plus the statistics mu and Delta.

    mu_k is the number of pairs in matching k; Delta_i is the degree of
    vertex i in the multigraph union, counting multiplicity.
    """
    terms = []
    mu = np.zeros(len(family.matchings))
    degree = np.zeros(family.d)
    for k, m in enumerate(family.matchings):
        arr = np.zeros((family.d, family.d))
        for a, b in m:
            arr[a - 1, b - 1] = 1.0
            arr[b - 1, a - 1] = 1.0
            degree[a - 1] += 1
            degree[b - 1] += 1
        mu[k] = len(m)
        terms.append(Tensor(order=2, dim=family.d, array=arr))
    return TensorSeries(terms=tuple(terms)), mu, degree


def iid_symmetric(d: int, r: int, rng: np.random.Generator) -> Tensor:
    """Symmetric Gaussian tensor with one N(0,1) per nondecreasing multi-index.

    The draw is written to every permuted position, so entries are equal
    across each index orbit and E ||T||_F^2 = d^r.
    """
    _check_entry_budget(d, r)
    arr = np.zeros((d,) * r)
    for idx in itertools.combinations_with_replacement(range(d), r):
        g = rng.standard_normal()
        for perm in set(itertools.permutations(idx)):
            arr[perm] = g
    return Tensor(order=r, dim=d, array=arr)


def nonhomogeneous(variances: Tensor, rng: np.random.Generator) -> Tensor:
    """Symmetric Gaussian tensor with per-orbit variance given by ``variances``."""
    from .tensor import is_symmetric

    a = variances
    if np.any(a.array < 0):
        raise InvalidInputError("variance tensor must be entrywise nonnegative")
    scale = float(np.max(np.abs(a.array))) if a.array.size else 0.0
    if not is_symmetric(a, tol=1e-12 * scale):
        raise InvalidInputError("variance tensor must be symmetric")
    d, r = a.dim, a.order
    arr = np.zeros((d,) * r)
    for idx in itertools.combinations_with_replacement(range(d), r):
        g = rng.standard_normal() * math.sqrt(a.array[idx])
        for perm in set(itertools.permutations(idx)):
            arr[perm] = g
    return Tensor(order=r, dim=d, array=arr)


def pca_observation(h: Hypergraph, v, lam: float, rng: np.random.Generator) -> Tensor:
    """Censored observation (A o lam v^{x r}) + noise supported on A.

    The signal vector must have +/-1 entries; the noise is the
    nonhomogeneous model with the adjacency tensor as variance tensor.
    """
    vv = np.asarray(v, dtype=np.float64)
    if vv.shape != (h.d,) or not np.all(np.abs(vv) == 1.0):
        raise InvalidInputError("signal vector must be in {-1, +1}^d")
    if lam < 0:
        raise InvalidInputError("lambda must be nonnegative")
    adj = adjacency_tensor(h)
    signal = hadamard(adj, Tensor(order=h.r, dim=h.d, array=lam * outer([vv] * h.r).array))
    noise = nonhomogeneous(adj, rng)
    return Tensor(order=h.r, dim=h.d, array=signal.array + noise.array)


def lower_bound_series(d: int, r: int) -> TensorSeries:
    """The d-term series attaining the type-2 lower bound.

    Term k has a single unit entry at index (1, ..., 1, k), so every term
    has injective norm exactly 1 for every p and the sum under any sign
    pattern is certified at d^{1 - 1/p} by an explicit witness.
    """
    if r < 1:
        raise InvalidInputError("r must be >= 1")
    _check_entry_budget(d, r)
    terms = []
    for k in range(d):
        arr = np.zeros((d,) * r)
        arr[(0,) * (r - 1) + (k,)] = 1.0
        terms.append(Tensor(order=r, dim=d, array=arr))
    return TensorSeries(terms=tuple(terms))


def lower_bound_witness(d: int, r: int, p, signs):
    """The witness (e_1, ..., e_1, v_r) with (v_r)_k = sign_k d^{-1/p}."""
    eps = np.asarray(signs, dtype=np.float64)
    if eps.shape != (d,) or not np.all(np.abs(eps) == 1.0):
        raise InvalidInputError("signs must be a +/-1 vector of length d")
    e1 = np.zeros(d)
    e1[0] = 1.0
    vr = eps * d ** (-1.0 / float(p))
    return [e1] * (r - 1) + [vr]


def rank1_series(vectors, r: int) -> TensorSeries:
    """Series with terms u_k^{x r}."""
    terms = []
    for u in vectors:
        vec = np.asarray(u, dtype=np.float64)
        terms.append(outer([vec] * r))
    return TensorSeries(terms=tuple(terms))


def multiset_equality_tensor(d: int, m: int) -> Tensor:
    """Order-2m tensor with entry 1 iff the two index m-tuples are equal as multisets."""
    if m < 0:
        raise InvalidInputError("m must be >= 0")
    if m == 0:
        return Tensor(order=0, dim=d, array=np.array(1.0))
    _check_entry_budget(d, 2 * m)
    tuples = list(itertools.product(range(d), repeat=m))
    codes = {}
    code_of = np.empty(len(tuples), dtype=np.int64)
    for i, tup in enumerate(tuples):
        key = tuple(sorted(tup))
        code_of[i] = codes.setdefault(key, len(codes))
    eq = (code_of[:, None] == code_of[None, :]).astype(np.float64)
    return Tensor(order=2 * m, dim=d, array=eq.reshape((d,) * (2 * m)))


def iid_star_sum(d: int, r: int, q: int) -> Tensor:
    """Exact sum_k T_k star_q T_k for the i.i.d. symmetric model.

    Because entries are equal across orbits and independent across orbits,
    the star-sum is d^q times the multiset-equality tensor on (r-q)-tuples.
    """
    if not 0 <= q <= r:
        raise InvalidInputError(f"q={q} out of range for order {r}")
    base = multiset_equality_tensor(d, r - q)
    return Tensor(order=base.order, dim=d, array=(float(d) ** q) * base.array)


_MODEL_KINDS = (
    "iid_symmetric",
    "nonhomogeneous",
    "censored_pca",
    "matching_series",
    "rank1_series",
    "lower_bound_series",
    "series",
)


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of a tensor model, JSON-round-trippable.

    ``sample(rng)`` draws one random tensor; ``series()`` returns the
    deterministic coefficient series for the kinds defined by one (the
    Gaussian draw is then sum_k g_k T_k).
    """

    kind: str
    d: int = 0
    r: int = 0
    variances: Tensor | None = None
    hypergraph: Hypergraph | None = None
    signal: tuple | None = None
    lam: float = 0.0
    family: MatchingFamily | None = None
    vectors: tuple | None = None
    terms: TensorSeries | None = None

    def __post_init__(self):
        if self.kind not in _MODEL_KINDS:
            raise InvalidInputError(f"unknown model kind {self.kind!r}")
        if self.kind == "iid_symmetric" and (self.d < 1 or self.r < 1):
            raise InvalidInputError("iid_symmetric needs d >= 1 and r >= 1")
        if self.kind == "nonhomogeneous" and self.variances is None:
            raise InvalidInputError("nonhomogeneous needs a variance tensor")
        if self.kind == "censored_pca":
            if self.hypergraph is None or self.signal is None:
                raise InvalidInputError("censored_pca needs a hypergraph and a signal vector")
            if self.lam < 0:
                raise InvalidInputError("lambda must be >= 0")
        if self.kind == "matching_series" and self.family is None:
            raise InvalidInputError("matching_series needs a matching family")
        if self.kind == "rank1_series" and (not self.vectors or self.r < 1):
            raise InvalidInputError("rank1_series needs vectors and r >= 1")
        if self.kind == "lower_bound_series" and (self.d < 1 or self.r < 1):
            raise InvalidInputError("lower_bound_series needs d >= 1 and r >= 1")
        if self.kind == "series" and self.terms is None:
            raise InvalidInputError("series needs explicit terms")

    @property
    def dim(self) -> int:
        if self.kind == "nonhomogeneous":
            return self.variances.dim
        if self.kind == "censored_pca":
            return self.hypergraph.d
        if self.kind == "matching_series":
            return self.family.d
        if self.kind == "rank1_series":
            return len(self.vectors[0])
        if self.kind == "series":
            return self.terms.dim
        return self.d

    @property
    def order(self) -> int:
        if self.kind == "nonhomogeneous":
            return self.variances.order
        if self.kind == "censored_pca":
            return self.hypergraph.r
        if self.kind == "matching_series":
            return 2
        if self.kind == "series":
            return self.terms.order
        return self.r

    def with_dim(self, d: int) -> "ModelSpec":
        if self.kind not in ("iid_symmetric", "lower_bound_series"):
            raise InvalidInputError(f"model kind {self.kind!r} does not support a d-sweep")
        return ModelSpec(kind=self.kind, d=d, r=self.r)

    def series(self) -> TensorSeries | None:
        """Coefficient series, or None for models without an explicit one."""
        if self.kind == "matching_series":
            return matching_series(self.family)[0]
        if self.kind == "rank1_series":
            return rank1_series(self.vectors, self.r)
        if self.kind == "lower_bound_series":
            return lower_bound_series(self.d, self.r)
        if self.kind == "series":
            return self.terms
        return None

    def sample(self, rng: np.random.Generator) -> Tensor:
        """One draw of the random tensor."""
        if self.kind == "iid_symmetric":
            return iid_symmetric(self.d, self.r, rng)
        if self.kind == "nonhomogeneous":
            return nonhomogeneous(self.variances, rng)
        if self.kind == "censored_pca":
            return pca_observation(self.hypergraph, np.asarray(self.signal), self.lam, rng)
        series = self.series()
        g = rng.standard_normal(len(series))
        return series_weighted_sum(series, g)

    def to_json_dict(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.kind in ("iid_symmetric", "lower_bound_series"):
            obj.update({"d": self.d, "r": self.r})
        elif self.kind == "nonhomogeneous":
            obj["variances"] = self.variances.to_json_dict()
        elif self.kind == "censored_pca":
            obj["hypergraph"] = self.hypergraph.to_json_dict()
            obj["signal"] = list(self.signal)
            obj["lambda"] = self.lam
        elif self.kind == "matching_series":
            obj["family"] = self.family.to_json_dict()
        elif self.kind == "rank1_series":
            obj["vectors"] = [list(v) for v in self.vectors]
            obj["r"] = self.r
        elif self.kind == "series":
            obj["terms"] = self.terms.to_json_list()
        return obj

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ModelSpec":
        try:
            kind = obj["kind"]
            if kind in ("iid_symmetric", "lower_bound_series"):
                return cls(kind=kind, d=int(obj["d"]), r=int(obj["r"]))
            if kind == "nonhomogeneous":
                return cls(kind=kind, variances=Tensor.from_json_dict(obj["variances"]))
            if kind == "censored_pca":
                return cls(
                    kind=kind,
                    hypergraph=Hypergraph.from_json_dict(obj["hypergraph"]),
                    signal=tuple(float(x) for x in obj["signal"]),
                    lam=float(obj["lambda"]),
                )
            if kind == "matching_series":
                return cls(kind=kind, family=MatchingFamily.from_json_dict(obj["family"]))
            if kind == "rank1_series":
                return cls(
                    kind=kind,
                    vectors=tuple(tuple(float(x) for x in v) for v in obj["vectors"]),
                    r=int(obj["r"]),
                )
            if kind == "series":
                return cls(kind=kind, terms=TensorSeries.from_json_list(obj["terms"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed model spec: {exc}") from exc
        raise InvalidInputError(f"unknown model kind {obj.get('kind')!r}")
