"""Abstract operation-count cost models for exact and bucketed top-k.

Three machines price an exact top-k over an (m, n) batch:

* Basic    — m * n * (log2 k + 1), the heap-scan asymptotic with the
             O(n) top-1 scan as its floor.
* Serial   — every operation costs; the model takes the cheaper of an
             insertion-sorted priority-queue scan, m*n*(3k - 1), and a
             radix select over log2(n)-bit keys, m*n*(4 log2 n + 4).
* Parallel — infinitely many threads; the cheaper of a scan-max,
             k*(2 log2 n + 3), and a parallel radix select,
             log2(n)*(2 log2 n + 16).  Batch size does not enter.

Small residual terms are dropped, logs are real-valued and divisions
are exact, so curves over parameters stay smooth.  The bucketed
selection is priced by composition: stage 1 is an exact top-k_b over
(m*b, n/b), plus, when b*k_b > k, a stage-2 exact top-k over the
b*k_b survivors.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

from .core import ConfigError, check_parameters
from .recall import expected_recall_error

__all__ = [
    "CostModelKind",
    "TradeoffPoint",
    "exact_cost",
    "approx_cost",
    "tradeoff_curve",
]

log = logging.getLogger(__name__)


class CostModelKind(enum.Enum):
    BASIC = "basic"
    SERIAL = "serial"
    PARALLEL = "parallel"

    @classmethod
    def from_string(cls, name: str) -> "CostModelKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ConfigError(
                "model", f"unknown cost model {name!r} "
                f"(expected one of {[m.value for m in cls]})"
            ) from None


@dataclass(frozen=True)
class TradeoffPoint:
    """One (b, k_b) configuration on a cost-vs-error curve."""

    b: int
    k_b: int
    ratio: float            # b * k_b / k, the stage-1 oversampling factor
    cost: float             # abstract operation count
    relative_cost: float    # cost / exact cost at the same model and shape
    expected_error: float   # placement-model expected recall error


def _model_cost(model: CostModelKind, n: float, k: float, m: float) -> float:
    """Minimum cost across the model's algorithms; real-valued arguments."""
    if model is CostModelKind.BASIC:
        return m * n * (math.log2(k) + 1.0)
    if model is CostModelKind.SERIAL:
        queue = m * n * (3.0 * k - 1.0)
        radix = m * n * (4.0 * math.log2(n) + 4.0)
        return min(queue, radix)
    scan_max = k * (2.0 * math.log2(n) + 3.0)
    radix = math.log2(n) * (2.0 * math.log2(n) + 16.0)
    return min(scan_max, radix)


def exact_cost(model: CostModelKind, n: int, k: int, m: int) -> float:
    """Abstract cost of an exact top-k over an (m, n) batch."""
    if n < 1 or k < 1 or m < 1:
        raise ConfigError("nonpositive", f"n, k, m must be >= 1 (n={n}, k={k}, m={m})")
    if k > n:
        raise ConfigError("k_gt_n", f"k > n (k={k}, n={n})")
    return _model_cost(model, float(n), float(k), float(m))


def approx_cost(model: CostModelKind, n: int, k: int, m: int, b: int, k_b: int) -> float:
    """Composed cost of the two-stage bucketed selection.

    Stage-1 cost is exact_cost over buckets of real size n/b; stage 2
    is added only when b*k_b > k.  Costs are assumed additive.
    """
    check_parameters(m, n, k, b, k_b)
    total = _model_cost(model, n / b, float(k_b), float(m * b))
    if b * k_b > k:
        total += _model_cost(model, float(b * k_b), float(k), float(m))
    return total


def tradeoff_curve(
    model: CostModelKind,
    n: int,
    k: int,
    k_b_list: Sequence[int],
    ratio_list: Sequence[float],
    m: int = 1,
) -> List[TradeoffPoint]:
    """Cost/error curve over a (k_b, ratio) grid at fixed (n, k).

    Each ratio must give an integer bucket count b = ratio*k/k_b with
    b*k_b <= n; non-conforming points are skipped and logged.  Points
    come back grouped by k_b, each group in ascending ratio.
    """
    baseline = exact_cost(model, n, k, m)
    points: List[TradeoffPoint] = []
    for k_b in k_b_list:
        for ratio in sorted(ratio_list):
            b_real = ratio * k / k_b
            b = int(round(b_real))
            if b < 1 or abs(b_real - b) > 1e-9:
                log.info(
                    "skipping k_b=%s ratio=%s: b=%s is not a positive integer",
                    k_b, ratio, b_real,
                )
                continue
            if b * k_b > n:
                log.info(
                    "skipping k_b=%s ratio=%s: b*k_b=%s exceeds n=%s",
                    k_b, ratio, b * k_b, n,
                )
                continue
            try:
                cost = approx_cost(model, n, k, m, b, k_b)
            except ConfigError as err:
                log.info("skipping k_b=%s ratio=%s: %s", k_b, ratio, err)
                continue
            points.append(
                TradeoffPoint(
                    b=b,
                    k_b=int(k_b),
                    ratio=b * k_b / k,
                    cost=cost,
                    relative_cost=cost / baseline,
                    expected_error=expected_recall_error(k, b, k_b).expected_error,
                )
            )
    return points
