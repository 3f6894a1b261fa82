"""Problem/configuration types, parameter validation, and bucket assignment.

Everything downstream (selection, recall models, cost models, the CLI)
shares the two assignment functions and the joint validity rules defined
here.  All functions are pure and stateless.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Assignment",
    "ProblemShape",
    "BucketScheme",
    "ConfigError",
    "NonFiniteInputError",
    "validate",
    "check_parameters",
    "bucket_of",
    "bucket_sizes",
]


class Assignment(enum.Enum):
    """How input positions map to buckets.

    INTERLEAVED assigns position i to bucket i mod b, which breaks up
    runs of neighbouring positions.  CONTIGUOUS assigns position i to
    bucket floor(b*i/n), keeping each bucket a consecutive slice.
    """

    INTERLEAVED = "interleaved"
    CONTIGUOUS = "contiguous"

    @classmethod
    def from_string(cls, name: str) -> "Assignment":
        try:
            return cls(name.lower())
        except ValueError:
            raise ConfigError(
                "assignment", f"unknown assignment {name!r} "
                f"(expected 'interleaved' or 'contiguous')"
            ) from None


@dataclass(frozen=True)
class ProblemShape:
    """Batch of m rows, each n elements long, selecting the k largest."""

    m: int
    n: int
    k: int


@dataclass(frozen=True)
class BucketScheme:
    """Bucketed selection parameters: b buckets, k_b kept per bucket."""

    b: int
    k_b: int
    assignment: Assignment = Assignment.INTERLEAVED


class ConfigError(ValueError):
    """A parameter combination violates the selection constraints.

    ``code`` is a stable machine-readable tag; the message names the
    violated constraint.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class NonFiniteInputError(ValueError):
    """Scores contain NaN or infinity; selection order would be undefined."""


def check_parameters(m: int, n: int, k: int, b: int, k_b: int) -> None:
    """Raise ConfigError unless (m, n, k, b, k_b) jointly form a valid config.

    Constraints, checked in order:
      * all five counts are positive integers,
      * k <= n,
      * b <= n,
      * k_b <= min(k, ceil(n/b)),
      * b * k_b >= k.

    The k_b upper bound uses ceil(n/b) so that ragged configurations
    (b not dividing n) are accepted; buckets smaller than k_b simply
    yield all their elements.
    """
    for name, value in (("m", m), ("n", n), ("k", k), ("b", b), ("k_b", k_b)):
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise ConfigError(
                "nonpositive", f"{name} must be a positive integer, got {value!r}"
            )
    if k > n:
        raise ConfigError("k_gt_n", f"k > n (k={k}, n={n})")
    if b > n:
        raise ConfigError("b_gt_n", f"b > n (b={b}, n={n})")
    kb_cap = min(k, -(-n // b))
    if k_b > kb_cap:
        raise ConfigError(
            "kb_range",
            f"k_b out of range (k_b={k_b}, allowed 1..min(k, ceil(n/b))={kb_cap})",
        )
    if b * k_b < k:
        raise ConfigError(
            "undersampled", f"b*kb < k (b={b}, kb={k_b}, k={k}; need b*kb >= k)"
        )


def validate(shape: ProblemShape, scheme: BucketScheme) -> None:
    """Check that a shape and scheme are jointly valid; raise ConfigError if not."""
    check_parameters(shape.m, shape.n, shape.k, scheme.b, scheme.k_b)


def bucket_of(i: int, n: int, b: int, assignment: Assignment) -> int:
    """Bucket id in [0, b) of position i.

    Caller guarantees 0 <= i < n and 1 <= b <= n.
    """
    if assignment is Assignment.INTERLEAVED:
        return i % b
    return (b * i) // n


def bucket_sizes(n: int, b: int, assignment: Assignment) -> np.ndarray:
    """Number of positions assigned to each bucket, as a length-b int array.

    Sizes always sum to n.  Every bucket holds floor(n/b) or ceil(n/b)
    positions under either assignment.
    """
    if assignment is Assignment.INTERLEAVED:
        base, rem = divmod(n, b)
        sizes = np.full(b, base, dtype=np.int64)
        sizes[:rem] += 1
        return sizes
    # Contiguous bucket j covers [ceil(j*n/b), ceil((j+1)*n/b)).
    starts = -(-(np.arange(b + 1, dtype=np.int64) * n) // b)
    return np.diff(starts)


def max_bucket_size(n: int, b: int) -> int:
    """ceil(n/b): the largest bucket under either assignment."""
    return -(-n // b)


def stage1_candidate_count(n: int, b: int, k_b: int, assignment: Assignment) -> int:
    """Candidates produced per row by bucketing: sum_j min(k_b, size_j)."""
    sizes = bucket_sizes(n, b, assignment)
    return int(np.minimum(sizes, k_b).sum())


def describe_scheme(n: int, scheme: BucketScheme) -> str:
    sizes = bucket_sizes(n, scheme.b, scheme.assignment)
    return (
        f"b={scheme.b} k_b={scheme.k_b} {scheme.assignment.value} "
        f"(bucket sizes {int(sizes.min())}..{int(sizes.max())})"
    )
