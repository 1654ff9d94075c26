"""Column-stochastic transition matrices and the implicit Google operator.

The transition matrix ``P`` is stored column-compressed (CSC): column ``j``
holds the normalized out-edge weights of node ``j``.  Nodes without out-edges
("dangling" nodes) produce empty columns; these are not filled in storage but
recorded in ``dangling`` and patched on the fly during products, either with
the uniform column ``e/n`` or with the personalization vector ``v``.

The Google operator ``A = alpha*P + (1 - alpha)*v*e^T`` is never formed
explicitly outside of :func:`materialize_dense`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DenseCapError, DimensionError, EmptyGraphError, InputError

DENSE_CAP = 2048
DEFAULT_ALPHA = 0.85
STOCHASTIC_TOL = 1e-12


class PatchPolicy(str, Enum):
    UNIFORM = "uniform"
    PERSONALIZATION = "personalization"


@dataclass(frozen=True)
class DirectedGraph:
    """Weighted directed graph on nodes ``0 .. n-1``.

    ``edges`` may contain repeated ``(source, target)`` pairs; their weights
    accumulate when the transition matrix is built.  Entries are
    ``(source, target)`` or ``(source, target, weight)``.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise EmptyGraphError("graph must have at least one node")
        normalized = []
        for edge in self.edges:
            if len(edge) == 2:
                s, t = edge
                w = 1.0
            elif len(edge) == 3:
                s, t, w = edge
            else:
                raise InputError(f"edge {edge!r} must have 2 or 3 fields")
            s, t, w = int(s), int(t), float(w)
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise InputError(f"edge ({s}, {t}) has node id outside [0, {self.n})")
            if not (w > 0.0 and np.isfinite(w)):
                raise InputError(f"edge ({s}, {t}) has non-positive weight {w!r}")
            normalized.append((s, t, w))
        object.__setattr__(self, "edges", tuple(normalized))

    def accumulated(self) -> dict[tuple[int, int], float]:
        """Edge weights with duplicates summed, in first-seen order."""
        acc: dict[tuple[int, int], float] = {}
        for s, t, w in self.edges:
            acc[(s, t)] = acc.get((s, t), 0.0) + w
        return acc

    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        for s, _, w in self.edges:
            deg[s] += w
        return deg


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def personalization_vector(v: Iterable[float] | None, n: int) -> np.ndarray:
    """Validate (or default to uniform) a teleportation vector of length ``n``."""
    if v is None:
        return _readonly(np.full(n, 1.0 / n))
    v = np.array(v, dtype=float).ravel()
    if v.shape != (n,):
        raise DimensionError(f"personalization vector has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise InputError("personalization vector must be finite and nonnegative")
    if abs(v.sum() - 1.0) > STOCHASTIC_TOL:
        raise InputError(f"personalization vector sums to {v.sum()!r}, expected 1")
    return _readonly(v)


def check_rank_vector(x: Iterable[float], n: int, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """Return ``x`` as a float array after checking ``x >= 0`` and ``||x||_1 = 1``."""
    x = np.array(x, dtype=float).ravel()
    if x.shape != (n,):
        raise DimensionError(f"vector has length {x.size}, expected {n}")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise InputError("rank vector must be finite and nonnegative")
    if abs(x.sum() - 1.0) > tol:
        raise InputError(f"rank vector has 1-norm {x.sum()!r}, expected 1")
    return x


@dataclass(frozen=True, eq=False)
class SparseTransition:
    """Column-stochastic ``n x n`` matrix in CSC storage plus a dangling patch.

    ``indptr``/``indices``/``data`` follow the usual CSC layout with strictly
    increasing row indices inside each column.  Columns listed in
    ``dangling`` are empty in storage; products treat them as ``e/n``
    (``PatchPolicy.UNIFORM``) or as ``v`` (``PatchPolicy.PERSONALIZATION``).
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    dangling: np.ndarray
    policy: PatchPolicy = PatchPolicy.UNIFORM
    _cols: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise EmptyGraphError("transition matrix must have n >= 1")
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        data = np.asarray(self.data, dtype=float)
        dangling = np.asarray(self.dangling, dtype=np.int64)
        if indptr.shape != (n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise InputError("malformed column pointer array")
        if data.shape != indices.shape:
            raise InputError("indices and data must have equal length")
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise InputError("row index out of range")
        if np.any(data < 0) or not np.all(np.isfinite(data)):
            raise InputError("transition entries must be finite and nonnegative")
        cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
        same_col = cols[1:] == cols[:-1]
        if np.any(np.diff(indices)[same_col] <= 0):
            raise InputError("row indices must be strictly increasing within a column")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "indptr", _readonly(indptr))
        object.__setattr__(self, "indices", _readonly(indices))
        object.__setattr__(self, "data", _readonly(data))
        object.__setattr__(self, "dangling", _readonly(dangling))
        object.__setattr__(self, "policy", PatchPolicy(self.policy))
        object.__setattr__(self, "_cols", _readonly(cols))

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @classmethod
    def from_dense(cls, M: np.ndarray) -> "SparseTransition":
        """Wrap an already column-stochastic dense matrix (no dangling columns)."""
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {M.shape}")
        n = M.shape[0]
        mask = M.T != 0
        rows = np.nonzero(mask)[1]
        indptr = np.concatenate([[0], np.cumsum(mask.sum(axis=1))])
        P = cls(n, indptr, rows, M.T[mask], np.empty(0, dtype=np.int64))
        if np.max(np.abs(P.column_sums() - 1.0)) > STOCHASTIC_TOL:
            raise InputError("matrix is not column-stochastic")
        return P

    def column_sums(self, v: np.ndarray | None = None) -> np.ndarray:
        sums = np.bincount(self._cols, weights=self.data, minlength=self.n).astype(float, copy=False)
        if self.dangling.size:
            sums[self.dangling] += self._patch_column(v).sum()
        return sums

    def _patch_column(self, v: np.ndarray | None) -> np.ndarray:
        if self.policy is PatchPolicy.UNIFORM:
            return np.full(self.n, 1.0 / self.n)
        if v is None:
            raise InputError("personalization patch requires the vector v")
        return np.asarray(v, dtype=float)

    def matvec(self, x: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
        return apply_transition(self, x, v)

    def to_dense(self, v: np.ndarray | None = None, cap: int = DENSE_CAP) -> np.ndarray:
        if self.n > cap:
            raise DenseCapError(f"refusing to densify n={self.n} > cap {cap}")
        M = np.zeros((self.n, self.n))
        M[self.indices, self._cols] = self.data
        if self.dangling.size:
            M[:, self.dangling] = self._patch_column(v)[:, None]
        return M


def build_transition(
    g: DirectedGraph, policy: PatchPolicy | str = PatchPolicy.UNIFORM
) -> SparseTransition:
    """Normalize each node's out-edge weights into column ``source`` of ``P``."""
    policy = PatchPolicy(policy)
    acc = g.accumulated()
    n = g.n
    if acc:
        src = np.fromiter((s for s, _ in acc), dtype=np.int64, count=len(acc))
        dst = np.fromiter((t for _, t in acc), dtype=np.int64, count=len(acc))
        w = np.fromiter(acc.values(), dtype=float, count=len(acc))
    else:
        src = dst = np.empty(0, dtype=np.int64)
        w = np.empty(0)
    order = np.lexsort((dst, src))
    src, dst, w = src[order], dst[order], w[order]
    colsum = np.bincount(src, weights=w, minlength=n)
    counts = np.bincount(src, minlength=n)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    data = w / colsum[src]
    dangling = np.flatnonzero(counts == 0)
    return SparseTransition(n, indptr, dst, data, dangling, policy)


def apply_transition(P: SparseTransition, x: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """Sparse product ``y = P x`` including the dangling-column patch.

    Accumulation runs over stored nonzeros in column-major order, then adds
    the dangling contribution, so results are bitwise reproducible.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (P.n,):
        raise DimensionError(f"vector has shape {x.shape}, expected ({P.n},)")
    y = np.bincount(P.indices, weights=P.data * x[P._cols], minlength=P.n).astype(float, copy=False)
    if P.dangling.size:
        mass = x[P.dangling].sum()
        if P.policy is PatchPolicy.UNIFORM:
            y += mass / P.n
        else:
            if v is None:
                raise InputError("personalization patch requires the vector v")
            y += mass * np.asarray(v, dtype=float)
    return y


@dataclass(frozen=True, eq=False)
class GoogleOperator:
    """Implicit ``A = alpha*P + (1 - alpha)*v*e^T``; ``v`` defaults to uniform."""

    transition: SparseTransition
    alpha: float = DEFAULT_ALPHA
    v: np.ndarray | Sequence[float] | None = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not 0.0 < alpha < 1.0:
            raise InputError(f"alpha must lie in the open interval (0, 1), got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "v", personalization_vector(self.v, self.transition.n))

    @property
    def n(self) -> int:
        return self.transition.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        return apply_google(self, x)


def apply_google(op: GoogleOperator, x: np.ndarray) -> np.ndarray:
    """``A x`` as a sparse product plus a rank-one teleportation correction."""
    x = np.asarray(x, dtype=float)
    y = apply_transition(op.transition, x, op.v)
    y *= op.alpha
    y += ((1.0 - op.alpha) * x.sum()) * op.v
    return y


def materialize_dense(op: GoogleOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense ``A`` for small problems; raises :class:`DenseCapError` above ``cap``."""
    if op.n > cap:
        raise DenseCapError(f"refusing to densify n={op.n} > cap {cap}")
    P = op.transition.to_dense(op.v, cap=cap)
    return op.alpha * P + (1.0 - op.alpha) * op.v[:, None]
