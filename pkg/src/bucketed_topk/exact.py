"""Exact top-k selection.

Two implementations with identical (bitwise) output:

* :func:`exact_topk_oracle` — full stable sort per row; the trusted
  reference used as ground truth for recall measurement.
* :func:`priority_queue_topk` — scans each row while maintaining a
  bounded priority queue kept sorted by insertion sort, the classic
  serial selection loop.

Results are canonical: each row is ordered by value descending, ties
broken by original index ascending, so two results are comparable by
plain equality.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple

import numpy as np

from .core import ConfigError, NonFiniteInputError

__all__ = [
    "ScoredIndex",
    "TopKResult",
    "exact_topk_oracle",
    "priority_queue_topk",
    "topk_with_indices",
]

# Above this k the scanning queue falls back to the sort path; the
# output contract is unchanged, only the constant factors differ.
PQ_FALLBACK_K = 64


class ScoredIndex(NamedTuple):
    """A score together with its zero-based position in the input row."""

    value: float
    index: int


@dataclass(frozen=True, eq=False)
class TopKResult:
    """Canonical per-row selection output.

    ``values`` and ``indices`` are (m, k) arrays; each row is sorted by
    value descending with ties broken by index ascending.
    """

    values: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.indices.shape or self.values.ndim != 2:
            raise ValueError("values and indices must be matching (m, k) arrays")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def row(self, r: int) -> List[ScoredIndex]:
        return [
            ScoredIndex(float(v), int(i))
            for v, i in zip(self.values[r], self.indices[r])
        ]

    def __iter__(self) -> Iterator[List[ScoredIndex]]:
        return (self.row(r) for r in range(self.m))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TopKResult):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(
            self.indices, other.indices
        )


def _as_matrix(scores) -> np.ndarray:
    """Validate scores into a finite float64 matrix (1-D input becomes one row)."""
    a = np.asarray(scores, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] == 0:
        raise ValueError(f"scores must be a non-empty m x n matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise NonFiniteInputError("scores contain NaN or infinity")
    return a


def _check_k(k: int, n: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigError("nonpositive", f"k must be a positive integer, got {k!r}")
    if k > n:
        raise ConfigError("k_gt_n", f"k > n (k={k}, n={n})")


def _row_blocks(m: int, workers: int) -> List[slice]:
    workers = max(1, min(int(workers), m))
    bounds = np.linspace(0, m, workers + 1, dtype=int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]


def _map_rows(fn, a: np.ndarray, workers: int) -> TopKResult:
    """Apply a per-block selection over row blocks, optionally in threads.

    Row results are independent, so the output is identical for any
    worker count or schedule.
    """
    blocks = _row_blocks(a.shape[0], workers)
    if len(blocks) == 1:
        parts = [fn(a)]
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = list(pool.map(lambda s: fn(a[s]), blocks))
    return TopKResult(
        values=np.concatenate([p.values for p in parts], axis=0),
        indices=np.concatenate([p.indices for p in parts], axis=0),
    )


def _canonical_order(values: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Per-row permutation sorting by value desc, then index asc.

    Two stable passes: sort by the secondary key first, then stably by
    the primary key.
    """
    by_index = np.argsort(indices, axis=1, kind="stable")
    v = np.take_along_axis(values, by_index, axis=1)
    by_value = np.argsort(-v, axis=1, kind="stable")
    return np.take_along_axis(by_index, by_value, axis=1)


def topk_with_indices(values: np.ndarray, indices: np.ndarray, k: int) -> TopKResult:
    """Canonical top-k of (value, index) pairs, carrying the given indices.

    Used wherever selection runs over gathered candidates whose
    positions in ``values`` are not their original row positions.
    """
    values = np.asarray(values, dtype=np.float64)
    indices = np.asarray(indices, dtype=np.int64)
    if values.ndim == 1:
        values, indices = values[None, :], indices[None, :]
    if values.shape != indices.shape:
        raise ValueError("values and indices must have matching shapes")
    _check_k(k, values.shape[1])
    order = _canonical_order(values, indices)[:, :k]
    return TopKResult(
        values=np.take_along_axis(values, order, axis=1),
        indices=np.take_along_axis(indices, order, axis=1),
    )


def _oracle_block(a: np.ndarray, k: int) -> TopKResult:
    # argsort of the negated row is value-descending; the stable kind
    # leaves equal values in index-ascending order.
    order = np.argsort(-a, axis=1, kind="stable")[:, :k].astype(np.int64)
    return TopKResult(values=np.take_along_axis(a, order, axis=1), indices=order)


def exact_topk_oracle(scores, k: int, workers: int = 1) -> TopKResult:
    """Exact top-k per row via a full stable sort.  Ground truth for recall."""
    a = _as_matrix(scores)
    _check_k(k, a.shape[1])
    return _map_rows(lambda blk: _oracle_block(blk, k), a, workers)


def _pq_row(row: np.ndarray, k: int) -> List[ScoredIndex]:
    """Scan one row keeping the k best in an insertion-sorted array.

    The queue is kept ascending by (value, -index), so q[0] is always
    the current worst.  A strict ``x > worst value`` test is sufficient:
    the scan visits indices in increasing order, so an incoming tie can
    never beat a queued entry under the canonical order.
    """
    q = sorted((float(row[i]), -i) for i in range(k))
    worst = q[0][0]
    for i in range(k, row.shape[0]):
        x = float(row[i])
        if x > worst:
            q.pop(0)
            bisect.insort(q, (x, -i))
            worst = q[0][0]
    return [(v, -negi) for v, negi in reversed(q)]


def priority_queue_topk(scores, k: int, workers: int = 1) -> TopKResult:
    """Exact top-k per row via a bounded insertion-sorted queue scan.

    Output is bitwise identical to :func:`exact_topk_oracle` on every
    finite input.  For k > PQ_FALLBACK_K the implementation switches to
    the sort path internally; the contract is unchanged.
    """
    a = _as_matrix(scores)
    _check_k(k, a.shape[1])
    if k > PQ_FALLBACK_K:
        return _map_rows(lambda blk: _oracle_block(blk, k), a, workers)

    def block(blk: np.ndarray) -> TopKResult:
        values = np.empty((blk.shape[0], k), dtype=np.float64)
        indices = np.empty((blk.shape[0], k), dtype=np.int64)
        for r in range(blk.shape[0]):
            entries = _pq_row(blk[r], k)
            for c, (v, i) in enumerate(entries):
                values[r, c] = v
                indices[r, c] = i
        # Gather values by index so bit patterns (e.g. -0.0) match the
        # oracle exactly.
        values = np.take_along_axis(blk, indices, axis=1)
        return TopKResult(values=values, indices=indices)

    return _map_rows(block, a, workers)
