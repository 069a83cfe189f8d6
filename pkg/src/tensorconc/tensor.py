"""Dense tensor container and the exact multilinear algebra.

Everything downstream (norm estimation, variance parameters, model
generators, bound evaluators) is built on the operations in this module.
Tensors are immutable dense float64 arrays of shape ``(dim,) * order`` in
row-major layout; an order-0 tensor holds a single entry and is how full
contractions are returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

# Constructions above this entry count are rejected (desk-scale focus).
MAX_ENTRIES = 10**8


def _check_entry_budget(dim: int, order: int) -> None:
    if order > 0 and dim**order > MAX_ENTRIES:
        raise ResourceLimitError(
            f"dense tensor with dim={dim}, order={order} needs {dim**order} "
            f"entries, above the guard of {MAX_ENTRIES}"
        )


@dataclass(frozen=True)
class Tensor:
    """Dense real tensor of shape ``(dim,) * order``.

    ``array`` is read-only after construction; all operations are pure, so
    values can be shared freely across threads.
    """

    order: int
    dim: int
    array: np.ndarray

    def __post_init__(self):
        if self.order < 0:
            raise InvalidInputError("order must be >= 0")
        if self.dim < 1:
            raise InvalidInputError("dim must be >= 1")
        _check_entry_budget(self.dim, self.order)
        arr = np.ascontiguousarray(self.array, dtype=np.float64)
        expected = (self.dim,) * self.order
        if arr.shape != expected:
            expected_size = self.dim**self.order if self.order else 1
            if arr.size != expected_size:
                raise InvalidInputError(
                    f"entries length {arr.size} does not match dim**order = {expected_size}"
                )
            arr = arr.reshape(expected)
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("tensor entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "array", arr)

    @classmethod
    def from_array(cls, array) -> "Tensor":
        arr = np.asarray(array, dtype=np.float64)
        order = arr.ndim
        dim = arr.shape[0] if order else 1
        return cls(order=order, dim=dim, array=arr)

    @classmethod
    def from_entries(cls, order: int, dim: int, entries) -> "Tensor":
        return cls(order=order, dim=dim, array=np.asarray(entries, dtype=np.float64))

    @property
    def entries(self) -> np.ndarray:
        """Flat row-major view of the entries."""
        return self.array.reshape(-1)

    def item(self) -> float:
        if self.order != 0 and self.array.size != 1:
            raise InvalidInputError("item() is only defined for single-entry tensors")
        return float(self.array.reshape(-1)[0])

    def to_json_dict(self) -> dict:
        return {"order": self.order, "dim": self.dim, "entries": self.entries.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Tensor":
        try:
            return cls.from_entries(int(obj["order"]), int(obj["dim"]), obj["entries"])
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed tensor object: {exc}") from exc


@dataclass(frozen=True)
class TensorSeries:
    """Nonempty list of same-shape coefficient tensors T_1 ... T_n.

    Together with i.i.d. standard Gaussians g_k these define the random
    tensor sum_k g_k T_k.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidInputError("a tensor series needs at least one term")
        order, dim = terms[0].order, terms[0].dim
        for t in terms[1:]:
            if t.order != order or t.dim != dim:
                raise InvalidInputError("all series terms must share (order, dim)")
        object.__setattr__(self, "terms", terms)

    @property
    def order(self) -> int:
        return self.terms[0].order

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_json_list(self) -> list:
        return [t.to_json_dict() for t in self.terms]

    @classmethod
    def from_json_list(cls, obj) -> "TensorSeries":
        if not isinstance(obj, list):
            raise InvalidInputError("a tensor series serializes to a JSON array")
        return cls(terms=tuple(Tensor.from_json_dict(t) for t in obj))


def _same_shape(a: Tensor, b: Tensor) -> bool:
    return a.order == b.order and (a.order == 0 or a.dim == b.dim)


def inner(a: Tensor, b: Tensor) -> float:
    """Entry-wise dot product of two same-shape tensors."""
    if not _same_shape(a, b):
        raise InvalidInputError(f"shape mismatch: {(a.order, a.dim)} vs {(b.order, b.dim)}")
    return float(np.vdot(a.array, b.array))


def frobenius(a: Tensor) -> float:
    """Frobenius norm, sqrt(<A, A>)."""
    return float(np.linalg.norm(a.array.reshape(-1)))


def hadamard(a: Tensor, b: Tensor) -> Tensor:
    """Entry-wise product of two same-shape tensors."""
    if not _same_shape(a, b):
        raise InvalidInputError(f"shape mismatch: {(a.order, a.dim)} vs {(b.order, b.dim)}")
    return Tensor(order=a.order, dim=a.dim, array=a.array * b.array)


def contract(a: Tensor, v, q: int) -> Tensor:
    """Contract the last ``q`` slots of ``a`` against the vector ``v``.

    Returns an order ``a.order - q`` tensor; ``q = a.order`` yields the full
    evaluation A[v, ..., v] as an order-0 tensor.
    """
    if not 0 <= q <= a.order:
        raise InvalidInputError(f"q={q} out of range for order {a.order}")
    vec = np.asarray(v, dtype=np.float64)
    if q > 0 and vec.shape != (a.dim,):
        raise InvalidInputError(f"vector length {vec.shape} does not match dim {a.dim}")
    arr = a.array
    for _ in range(q):
        arr = np.tensordot(arr, vec, axes=([-1], [0]))
    return Tensor(order=a.order - q, dim=a.dim, array=arr)


def apply_form(a: Tensor, vectors) -> float:
    """Evaluate the multilinear form A[u_1, ..., u_r]."""
    vectors = list(vectors)
    if len(vectors) != a.order:
        raise InvalidInputError(f"need {a.order} vectors, got {len(vectors)}")
    arr = a.array
    for v in reversed(vectors):
        vec = np.asarray(v, dtype=np.float64)
        if vec.shape != (a.dim,):
            raise InvalidInputError(f"vector length {vec.shape} does not match dim {a.dim}")
        arr = np.tensordot(arr, vec, axes=([-1], [0]))
    return float(arr)


def outer(vectors) -> Tensor:
    """Tensor product u_1 x ... x u_r as a dense tensor."""
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise InvalidInputError("outer() needs at least one vector")
    dim = vectors[0].shape[0]
    _check_entry_budget(dim, len(vectors))
    arr = vectors[0]
    for v in vectors[1:]:
        if v.shape != (dim,):
            raise InvalidInputError("all vectors must share the same length")
        arr = np.tensordot(arr, v, axes=0)
    return Tensor(order=len(vectors), dim=dim, array=arr)


def star(a: Tensor, b: Tensor, q: int) -> Tensor:
    """Partial contraction over ``q`` shared indices, an order 2r-2q tensor.

    The last ``q`` slots of ``a`` are summed against the first ``q`` slots of
    ``b``; q=0 is the outer product and q=r collapses to <A, B>.
    """
    if not _same_shape(a, b):
        raise InvalidInputError(f"shape mismatch: {(a.order, a.dim)} vs {(b.order, b.dim)}")
    if not 0 <= q <= a.order:
        raise InvalidInputError(f"q={q} out of range for order {a.order}")
    out_order = 2 * a.order - 2 * q
    _check_entry_budget(a.dim, out_order)
    arr = np.tensordot(a.array, b.array, axes=q)
    return Tensor(order=out_order, dim=a.dim, array=arr)


def symmetrize(a: Tensor) -> Tensor:
    """Average of A over all index permutations (fixed point on symmetric input)."""
    if a.order <= 1:
        return a
    acc = np.zeros_like(a.array)
    count = 0
    for perm in itertools.permutations(range(a.order)):
        acc += np.transpose(a.array, perm)
        count += 1
    return Tensor(order=a.order, dim=a.dim, array=acc / count)


def is_symmetric(a: Tensor, tol: float | None = None) -> bool:
    """True iff entries agree across permuted index tuples up to ``tol``.

    The default tolerance is 1e-12 * max|entry|, since floating-point
    symmetrization is inexact.
    """
    if tol is None:
        scale = float(np.max(np.abs(a.array))) if a.array.size else 0.0
        tol = 1e-12 * scale
    if a.order <= 1:
        return True
    for perm in itertools.permutations(range(a.order)):
        if perm == tuple(range(a.order)):
            continue
        dev = float(np.max(np.abs(a.array - np.transpose(a.array, perm))))
        if dev > tol:
            return False
    return True


def is_diagonal_free(a: Tensor) -> bool:
    """True iff every entry indexed with a repeated coordinate is exactly 0."""
    if a.order <= 1:
        return True
    d, r = a.dim, a.order
    repeated = np.zeros((d,) * r, dtype=bool)
    idx = np.arange(d)
    for s in range(r):
        for t in range(s + 1, r):
            shape_s = [1] * r
            shape_s[s] = d
            shape_t = [1] * r
            shape_t[t] = d
            repeated |= idx.reshape(shape_s) == idx.reshape(shape_t)
    return not np.any(a.array[repeated])


def vector_piece(v, q: int, d: int):
    """The q-th length-d piece of a vector in R^{r*d} (q is 1-based)."""
    vec = np.asarray(v, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] % d != 0:
        raise InvalidInputError(f"vector length {vec.shape} is not a multiple of d={d}")
    r = vec.shape[0] // d
    if not 1 <= q <= r:
        raise InvalidInputError(f"piece index {q} out of range 1..{r}")
    return vec[(q - 1) * d : q * d]


def sym_embed(t: Tensor) -> Tensor:
    """Symmetric, diagonal-free embedding of T into dimension order*dim.

    The output S is the unique tensor with
    S[v_1, ..., v_r] = sum over permutations tau of
    T[piece_1(v_tau(1)), ..., piece_r(v_tau(r))]; for r=2 this is the
    symmetric block dilation [[0, T], [T^t, 0]].
    """
    r, d = t.order, t.dim
    if r < 1:
        raise InvalidInputError("symmetric embedding needs order >= 1")
    _check_entry_budget(r * d, r)
    out = np.zeros((r * d,) * r)
    for sigma in itertools.permutations(range(r)):
        block_index = tuple(slice(b * d, (b + 1) * d) for b in sigma)
        # np.transpose puts input axis sigma[k] at output position k, which
        # is exactly the entry rule of the defining multilinear identity
        out[block_index] = np.transpose(t.array, sigma)
    return Tensor(order=r, dim=r * d, array=out)


def scale(a: Tensor, c: float) -> Tensor:
    return Tensor(order=a.order, dim=a.dim, array=a.array * float(c))


def add(a: Tensor, b: Tensor) -> Tensor:
    if not _same_shape(a, b):
        raise InvalidInputError(f"shape mismatch: {(a.order, a.dim)} vs {(b.order, b.dim)}")
    return Tensor(order=a.order, dim=a.dim, array=a.array + b.array)


def series_weighted_sum(series: TensorSeries, weights) -> Tensor:
    """sum_k w_k T_k for a coefficient vector w."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (len(series),):
        raise InvalidInputError(f"need {len(series)} weights, got {w.shape}")
    acc = np.zeros_like(series.terms[0].array)
    for wk, tk in zip(w, series.terms):
        acc = acc + wk * tk.array
    return Tensor(order=series.order, dim=series.dim, array=acc)
