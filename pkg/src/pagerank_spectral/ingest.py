"""Edge-list parsing, result serialization and seeded random instances.

Edge-list grammar (LF or CRLF line endings)::

    # nodes: N          optional header, raises the node count to at least N
    # anything else     comment
    src dst [weight]    whitespace-separated; ids are nonnegative integers

Random instances draw from PCG64 (numpy's ``PCG64`` bit generator seeded
through ``SeedSequence``).  Only the raw 64-bit output stream is used, and it
is converted to doubles here, so results do not depend on numpy's
distribution code, which carries no cross-version stability guarantee.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core import DirectedGraph, SparseTransition, personalization_vector
from .errors import InputError, ParseError

if TYPE_CHECKING:
    from .solver import RankResult

_HEADER = re.compile(r"#\s*nodes\s*:\s*(\S+)\s*$", re.IGNORECASE)
_TWO_POW_MINUS_53 = 2.0 ** -53


def parse_edge_list(text: str | bytes) -> DirectedGraph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    acc: dict[tuple[int, int], float] = {}
    declared = 0
    max_id = -1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r").strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                try:
                    declared = int(m.group(1))
                except ValueError:
                    raise ParseError(lineno, f"bad node count {m.group(1)!r}") from None
                if declared < 0:
                    raise ParseError(lineno, "node count must be nonnegative")
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ParseError(lineno, f"expected 'source target [weight]', got {line!r}")
        try:
            s, t = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(lineno, f"node ids must be integers: {line!r}") from None
        if s < 0 or t < 0:
            raise ParseError(lineno, "node ids must be nonnegative")
        w = 1.0
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise ParseError(lineno, f"bad weight {fields[2]!r}") from None
            if not (w > 0.0 and math.isfinite(w)):
                raise ParseError(lineno, f"weight must be positive and finite, got {fields[2]!r}")
        acc[(s, t)] = acc.get((s, t), 0.0) + w
        max_id = max(max_id, s, t)
    n = max(max_id + 1, declared)
    return DirectedGraph(n, tuple((s, t, w) for (s, t), w in acc.items()))


def write_edge_list(g: DirectedGraph) -> str:
    lines = [f"# nodes: {g.n}"]
    lines += [f"{s} {t} {w:.17g}" for (s, t), w in g.accumulated().items()]
    return "\n".join(lines) + "\n"


def parse_vector(text: str | bytes, n: int | None = None) -> np.ndarray:
    """One float per line (blank and ``#`` lines skipped), validated to sum to 1."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(lineno, f"not a number: {line!r}") from None
    return personalization_vector(values, len(values) if n is None else n)


class Pcg64Stream:
    """Doubles derived from the raw PCG64 output, independent of numpy's samplers."""

    def __init__(self, seed: int):
        if seed < 0 or seed >= 2 ** 64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._bits = np.random.PCG64(seed)

    def raw(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in the open interval (0, 1) from the top 53 bits."""
        return ((self.raw(size) >> np.uint64(11)).astype(float) + 0.5) * _TWO_POW_MINUS_53

    def exponential(self, size: int) -> np.ndarray:
        return -np.log(self.uniform(size))

    def simplex(self, n: int) -> np.ndarray:
        """Uniform sample from the probability simplex (normalized exponentials)."""
        x = self.exponential(n)
        return x / x.sum()


@dataclass(frozen=True)
class RandomInstanceSpec:
    """``density=None`` selects dense mode; otherwise expected nonzeros per column."""

    n: int
    seed: int = 0
    density: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if self.density is not None and not self.density >= 1:
            raise InputError(f"density must be >= 1, got {self.density}")


def random_stochastic(spec: RandomInstanceSpec, rng: Pcg64Stream | None = None) -> SparseTransition:
    """Column-stochastic matrix, deterministic in ``spec``.

    Dense mode: every column is an independent uniform draw from the simplex.
    Sparse mode: each entry is kept with probability ``density / n`` (at least
    one per column, chosen uniformly if none survive) and the kept entries get
    normalized exponential weights.  Columns are drawn left to right.
    """
    n = spec.n
    rng = rng or Pcg64Stream(spec.seed)
    if spec.density is None:
        M = np.empty((n, n))
        for j in range(n):
            M[:, j] = rng.simplex(n)
        return SparseTransition.from_dense(M)
    p = min(1.0, spec.density / n)
    indptr = [0]
    indices: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for _ in range(n):
        rows = np.flatnonzero(rng.uniform(n) < p)
        if rows.size == 0:
            rows = np.array([min(int(rng.uniform(1)[0] * n), n - 1)])
        w = rng.exponential(rows.size)
        indices.append(rows)
        data.append(w / w.sum())
        indptr.append(indptr[-1] + rows.size)
    return SparseTransition(
        n, np.array(indptr), np.concatenate(indices), np.concatenate(data), np.empty(0, dtype=int)
    )


def random_instance(spec: RandomInstanceSpec) -> tuple[SparseTransition, np.ndarray]:
    """Transition matrix followed by a simplex-uniform ``v`` from the same stream."""
    rng = Pcg64Stream(spec.seed)
    P = random_stochastic(spec, rng)
    return P, rng.simplex(spec.n)


def random_simplex(n: int, seed: int) -> np.ndarray:
    return Pcg64Stream(seed).simplex(n)


def _num(x: float | None) -> str:
    if x is None or not math.isfinite(x):
        return "null"
    return f"{x:.17g}"


def ranking_order(scores: np.ndarray) -> np.ndarray:
    """Node ids by descending score, ties by ascending id."""
    scores = np.asarray(scores)
    return np.lexsort((np.arange(scores.size), -scores))


def write_rank_result(r: "RankResult", fmt: str = "json") -> str:
    """Serialize a rank result; floats carry 17 significant digits."""
    fmt = fmt.lower()
    if fmt == "json":
        scores = ", ".join(_num(float(s)) for s in r.x)
        return (
            "{"
            f'"scores": [{scores}], '
            f'"iterations": {int(r.iterations)}, '
            f'"converged": {json.dumps(bool(r.converged))}, '
            f'"final_residual": {_num(r.final_residual)}, '
            f'"estimated_rate": {_num(r.estimated_rate)}'
            "}\n"
        )
    if fmt in ("csv", "tsv"):
        sep = "," if fmt == "csv" else "\t"
        return "".join(f"{i}{sep}{r.x[i]:.17g}\n" for i in ranking_order(r.x))
    raise InputError(f"unknown format {fmt!r}; expected json, csv or tsv")
