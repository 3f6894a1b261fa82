"""Two-stage bucketed approximate top-k.

Stage 1 splits each row into b buckets and keeps the top k_b of every
bucket.  Stage 2 (needed only when more than k candidates survive)
runs an exact top-k over the surviving candidates, carrying original
row indices throughout.

Two execution modes produce bit-identical results:

* :class:`PerBucket` — one logical worker scans each whole bucket.
* :class:`ChunkedMerge` — each bucket is split into c interleaved
  chunks, every chunk keeps its own k_b queue, and the c*k_b survivors
  are merged once per bucket by a single sort.

Mode only changes the execution shape, never the output, so results
are independent of worker count and scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np

from .core import (
    Assignment,
    BucketScheme,
    ConfigError,
    ProblemShape,
    bucket_sizes,
    check_parameters,
    max_bucket_size,
)
from .exact import ScoredIndex, TopKResult, _as_matrix, _row_blocks, topk_with_indices

__all__ = [
    "PerBucket",
    "ChunkedMerge",
    "ExecutionMode",
    "Stage1Candidates",
    "stage1",
    "approx_topk",
    "select_mode",
]

# Below this per-bucket k the selection uses repeated argmax passes,
# the vectorised analogue of a tiny fixed-size queue; larger k_b uses
# a stable sort of each bucket.
_SMALL_KB = 4

# Bucket-size threshold in the mode-selection heuristic.
_CHUNK_THRESHOLD = 64


@dataclass(frozen=True)
class PerBucket:
    """One worker per (row, bucket); each scans its whole bucket."""


@dataclass(frozen=True)
class ChunkedMerge:
    """Split each bucket into interleaved chunks merged by a single sort."""

    chunks_per_bucket: int

    def __post_init__(self):
        if (
            not isinstance(self.chunks_per_bucket, (int, np.integer))
            or self.chunks_per_bucket < 2
        ):
            raise ConfigError(
                "chunks_range",
                f"chunks_per_bucket must be >= 2, got {self.chunks_per_bucket!r}",
            )


ExecutionMode = Union[PerBucket, ChunkedMerge]


@dataclass(frozen=True)
class Stage1Candidates:
    """Per-row stage-1 survivors, in bucket-id order.

    Bucket j contributes ``per_bucket[j] = min(k_b, size_j)`` entries,
    each bucket's contribution sorted by value descending (ties by
    index ascending).  ``values``/``indices`` are (m, C) with
    C = per_bucket.sum().
    """

    values: np.ndarray
    indices: np.ndarray
    per_bucket: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def count_per_row(self) -> int:
        return self.values.shape[1]

    def row(self, r: int) -> List[ScoredIndex]:
        return [
            ScoredIndex(float(v), int(i))
            for v, i in zip(self.values[r], self.indices[r])
        ]


@lru_cache(maxsize=16)
def _index_map(n: int, b: int, assignment: Assignment) -> Tuple[np.ndarray, np.ndarray]:
    """(b, s) map of original positions per bucket slot, -1 where padded.

    Slots within a bucket are in increasing original-index order for
    both assignments, which later lets stable sorts break value ties by
    original index for free.
    """
    s = max_bucket_size(n, b)
    sizes = bucket_sizes(n, b, assignment)
    if assignment is Assignment.INTERLEAVED:
        grid = np.arange(b, dtype=np.int64)[:, None] + b * np.arange(s, dtype=np.int64)
        grid[grid >= n] = -1
    else:
        starts = -(-(np.arange(b, dtype=np.int64) * n) // b)
        grid = starts[:, None] + np.arange(s, dtype=np.int64)
        grid[np.arange(s)[None, :] >= sizes[:, None]] = -1
    grid.setflags(write=False)
    sizes.setflags(write=False)
    return grid, sizes


def _gather_cube(a: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """(m, b, s) value cube with -inf in padded slots."""
    cube = a[:, grid.clip(min=0)]
    if (grid < 0).any():
        cube[:, grid < 0] = -np.inf
    return cube


def _top_slots(cube: np.ndarray, k_b: int):
    """Per-bucket top-k_b along the last axis: (slot positions, values).

    Output is value-descending; ties resolve to the smallest slot
    (argmax returns the first maximum, stable sort preserves slot
    order), which is the smallest original index.  Groups with fewer
    than k_b real elements repeat an exhausted slot with value -inf;
    callers must treat -inf entries as padding, never as selections.
    """
    if k_b <= _SMALL_KB:
        work = cube.copy()
        picks = np.empty(cube.shape[:-1] + (k_b,), dtype=np.int64)
        vals = np.empty(cube.shape[:-1] + (k_b,), dtype=cube.dtype)
        for t in range(k_b):
            am = np.argmax(work, axis=-1)[..., None]
            picks[..., t : t + 1] = am
            # read the value before masking so an exhausted group
            # yields -inf here rather than resurrecting a real value
            vals[..., t : t + 1] = np.take_along_axis(work, am, axis=-1)
            np.put_along_axis(work, am, -np.inf, axis=-1)
        return picks, vals
    picks = np.argsort(-cube, axis=-1, kind="stable")[..., :k_b].astype(np.int64)
    return picks, np.take_along_axis(cube, picks, axis=-1)


def _stage1_per_bucket(a, grid, k_b):
    cube = _gather_cube(a, grid)                       # (m, b, s)
    picks, vals = _top_slots(cube, k_b)                # (m, b, k_b)
    idx = np.take_along_axis(
        np.broadcast_to(grid[None, :, :], cube.shape), picks, axis=2
    )
    return vals, idx


def _stage1_chunked(a, grid, k_b, chunks):
    m = a.shape[0]
    b, s = grid.shape
    s_pad = -(-s // chunks) * chunks
    cube = np.full((m, b, s_pad), -np.inf, dtype=np.float64)
    cube[:, :, :s] = _gather_cube(a, grid)
    gpad = np.full((b, s_pad), -1, dtype=np.int64)
    gpad[:, :s] = grid
    # Slot t of a bucket goes to chunk t % chunks at within-chunk
    # position t // chunks, mirroring the bucket assignment itself.
    per = s_pad // chunks
    cube = cube.reshape(m, b, per, chunks).transpose(0, 1, 3, 2)   # (m,b,c,per)
    gpad = gpad.reshape(b, per, chunks).transpose(0, 2, 1)         # (b,c,per)

    picks, cand_v = _top_slots(cube, min(k_b, per))                # (m,b,c,q)
    cand_i = np.take_along_axis(
        np.broadcast_to(gpad[None], cube.shape), picks, axis=3
    )
    cand_i = np.where(np.isneginf(cand_v), -1, cand_i)  # exhausted picks are padding
    # Single merge per bucket: sort the c*q survivors canonically and
    # keep k_b.  Padded entries are -inf and lose to any real value.
    cand_v = cand_v.reshape(m, b, -1)
    cand_i = cand_i.reshape(m, b, -1)
    by_index = np.argsort(cand_i, axis=2, kind="stable")
    v = np.take_along_axis(cand_v, by_index, axis=2)
    by_value = np.argsort(-v, axis=2, kind="stable")
    order = np.take_along_axis(by_index, by_value, axis=2)[:, :, :k_b]
    vals = np.take_along_axis(cand_v, order, axis=2)
    idx = np.take_along_axis(cand_i, order, axis=2)
    return vals, idx


def stage1(scores, scheme: BucketScheme, mode: ExecutionMode = PerBucket()) -> Stage1Candidates:
    """Per-bucket top-k_b of every row; candidates in bucket-id order.

    Buckets smaller than k_b contribute all of their elements.  The
    result is independent of the execution mode.
    """
    a = _as_matrix(scores)
    n = a.shape[1]
    # Stage 1 does not involve k; check the scheme against n only.
    if not isinstance(scheme.b, (int, np.integer)) or not (1 <= scheme.b <= n):
        raise ConfigError("b_gt_n", f"b must be in 1..n (b={scheme.b}, n={n})")
    cap = max_bucket_size(n, scheme.b)
    if not isinstance(scheme.k_b, (int, np.integer)) or not (1 <= scheme.k_b <= cap):
        raise ConfigError(
            "kb_range",
            f"k_b out of range (k_b={scheme.k_b}, allowed 1..ceil(n/b)={cap})",
        )
    sizes = bucket_sizes(n, scheme.b, scheme.assignment)

    grid, _ = _index_map(n, scheme.b, scheme.assignment)
    if isinstance(mode, ChunkedMerge):
        vals, idx = _stage1_chunked(a, grid, scheme.k_b, mode.chunks_per_bucket)
    else:
        vals, idx = _stage1_per_bucket(a, grid, scheme.k_b)

    # Keep only each bucket's real contribution: slot t survives iff
    # t < min(k_b, size_j).  The mask is row-independent.
    contrib = np.minimum(sizes, scheme.k_b)
    keep = (np.arange(vals.shape[2])[None, :] < contrib[:, None]).ravel()
    m = a.shape[0]
    return Stage1Candidates(
        values=vals.reshape(m, -1)[:, keep],
        indices=idx.reshape(m, -1)[:, keep],
        per_bucket=contrib,
    )


def approx_topk(
    scores,
    k: int,
    scheme: BucketScheme,
    mode: ExecutionMode = PerBucket(),
    workers: int = 1,
) -> TopKResult:
    """Bucketed approximate top-k: stage-1 bucket selection, then an
    exact top-k over the survivors when more than k remain.

    When b*k_b == k and no bucket is short, stage 2 reduces to a
    canonical reordering of the stage-1 output.  Raises ConfigError
    (code ``insufficient_candidates``) if stage 1 cannot supply k
    candidates, which happens only when short buckets truncate.
    """
    a = _as_matrix(scores)
    shape = ProblemShape(m=a.shape[0], n=a.shape[1], k=k)
    check_parameters(shape.m, shape.n, shape.k, scheme.b, scheme.k_b)

    def block(blk: np.ndarray) -> TopKResult:
        cands = stage1(blk, scheme, mode)
        if cands.count_per_row < k:
            raise ConfigError(
                "insufficient_candidates",
                f"stage 1 yields {cands.count_per_row} candidates per row "
                f"but k={k}; short buckets truncated the oversample",
            )
        return topk_with_indices(cands.values, cands.indices, k)

    blocks = _row_blocks(a.shape[0], workers)
    if len(blocks) == 1:
        return block(a)
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(lambda s: block(a[s]), blocks))
    return TopKResult(
        values=np.concatenate([p.values for p in parts], axis=0),
        indices=np.concatenate([p.indices for p in parts], axis=0),
    )


def select_mode(shape: ProblemShape, scheme: BucketScheme, lanes: int) -> ExecutionMode:
    """Pick an execution mode for the available hardware parallelism.

    PerBucket already saturates the machine when there are at least as
    many (row, bucket) tasks as lanes, and is also preferred when
    buckets are small; otherwise chunking recovers parallelism within
    buckets.
    """
    if shape.m * scheme.b >= lanes:
        return PerBucket()
    if max_bucket_size(shape.n, scheme.b) < _CHUNK_THRESHOLD:
        return PerBucket()
    return ChunkedMerge(_CHUNK_THRESHOLD)
