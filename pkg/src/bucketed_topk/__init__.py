"""Bucketed approximate top-k selection.

A library for studying the two-stage bucketed approximation of top-k:
split each row into b buckets, keep the top k_b of every bucket, and
(only when more than k candidates survive) finish with an exact top-k
over the survivors.  Ships exact reference selections, analytic recall
models, abstract cost models, synthetic data generators, a timing
harness, and a CSV-emitting CLI for sweeps.
"""

from .approx import (
    ChunkedMerge,
    ExecutionMode,
    PerBucket,
    Stage1Candidates,
    approx_topk,
    select_mode,
    stage1,
)
from .bench import BandwidthReport, TimingStats, bandwidth, time_selection
from .core import (
    Assignment,
    BucketScheme,
    ConfigError,
    NonFiniteInputError,
    ProblemShape,
    bucket_of,
    bucket_sizes,
    validate,
)
from .cost import CostModelKind, TradeoffPoint, approx_cost, exact_cost, tradeoff_curve
from .exact import (
    ScoredIndex,
    TopKResult,
    exact_topk_oracle,
    priority_queue_topk,
    topk_with_indices,
)
from .recall import (
    MonteCarloRecall,
    RecallEstimate,
    binom_cdf,
    empirical_recall,
    empirical_recall_rows,
    expected_recall_error,
    expected_recall_kb1,
    monte_carlo_recall,
    worst_case_recall_error,
)
from .simdata import ar1_batch, ar1_sequence, derive_seed, iid_normal, permute

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BandwidthReport",
    "BucketScheme",
    "ChunkedMerge",
    "ConfigError",
    "CostModelKind",
    "ExecutionMode",
    "MonteCarloRecall",
    "NonFiniteInputError",
    "PerBucket",
    "ProblemShape",
    "RecallEstimate",
    "ScoredIndex",
    "Stage1Candidates",
    "TimingStats",
    "TopKResult",
    "TradeoffPoint",
    "approx_cost",
    "approx_topk",
    "ar1_batch",
    "ar1_sequence",
    "bandwidth",
    "binom_cdf",
    "bucket_of",
    "bucket_sizes",
    "derive_seed",
    "empirical_recall",
    "empirical_recall_rows",
    "exact_cost",
    "exact_topk_oracle",
    "expected_recall_error",
    "expected_recall_kb1",
    "iid_normal",
    "monte_carlo_recall",
    "permute",
    "priority_queue_topk",
    "select_mode",
    "stage1",
    "time_selection",
    "topk_with_indices",
    "tradeoff_curve",
    "validate",
    "worst_case_recall_error",
]
