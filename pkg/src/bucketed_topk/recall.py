"""Recall models for bucketed selection.

Analytic side: the expected recall of the two-stage selection under the
equiprobable-placement model (each of the k top values lands in any of
the b buckets with probability 1/b, independently), its k_b = 1 closed
form, and the adversarial worst case where top values concentrate in as
few buckets as possible.

Empirical side: recall of a concrete result against the exact oracle,
and a seeded Monte Carlo estimate over i.i.d. Gaussian inputs.

The placement model is exact only when buckets are large relative to
k_b and top values are dilute (k much smaller than n); otherwise it
overstates the expected error, so treat it as a conservative bound for
dense selections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import simdata
from .approx import ExecutionMode, PerBucket, approx_topk
from .core import BucketScheme, ProblemShape, validate
from .exact import ScoredIndex, TopKResult, exact_topk_oracle

__all__ = [
    "RecallEstimate",
    "MonteCarloRecall",
    "binom_cdf",
    "expected_recall_error",
    "expected_recall_kb1",
    "worst_case_recall_error",
    "empirical_recall",
    "empirical_recall_rows",
    "monte_carlo_recall",
]


@dataclass(frozen=True)
class RecallEstimate:
    """Expected recall and its complement, both in [0, 1]."""

    expected_recall: float
    expected_error: float


@dataclass(frozen=True)
class MonteCarloRecall:
    """Mean recall over trials with its standard error."""

    mean_recall: float
    stderr: float
    trials: int


def binom_cdf(x: int, trials: int, p: float) -> float:
    """Pr(X <= x) for X ~ Binom(trials, p).

    Computed by the incremental pmf recurrence over the success count,
    summing the shorter tail with exact (fsum) accumulation.  Terms are
    carried in scaled (mantissa, exponent) form so deep-underflow tails
    do not collapse to zero mid-recurrence.  Absolute error stays below
    1e-12 for trials <= 2**20.
    """
    if not (0 <= x <= trials):
        raise ValueError(f"x must lie in 0..trials, got x={x}, trials={trials}")
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if p == 1.0:
        return 1.0 if x == trials else 0.0
    if x == trials:
        return 1.0

    if x + 1 <= trials - x:
        return _tail_sum(trials, p, last=x, from_low=True)
    return 1.0 - _tail_sum(trials, p, last=x + 1, from_low=False)


def _scaled_pow(base, exponent: int) -> tuple:
    """base**exponent as (t, e) with value t * 2**e and t in [0.5, 1).

    Square-and-multiply with mantissa renormalization after every step,
    so the result never under/overflows and carries only ~2*log2(exp)
    rounding errors regardless of how deep the true value sits.
    """
    one = base - base + 1.0  # unit of base's dtype
    t, e = one, 0
    bt, be = np.frexp(base)
    be = int(be)
    while exponent:
        if exponent & 1:
            t, add = np.frexp(t * bt)
            e += be + int(add)
        bt, add = np.frexp(bt * bt)
        be = 2 * be + int(add)
        exponent >>= 1
    return t, e


def _tail_sum(trials: int, p: float, last: int, from_low: bool) -> float:
    """Sum of pmf terms from one end of the support up to/down to ``last``.

    from_low: pmf(0) + ... + pmf(last), recursing upward; otherwise
    pmf(trials) + ... + pmf(last), recursing downward.  The chain runs
    in extended precision (long double where the platform has it) so
    that rounding stays below 1e-12 even over 2**19-step walks.
    """
    ld = np.longdouble
    pl = ld(p)
    ql = ld(1.0) - pl
    ratio = (pl / ql) if from_low else (ql / pl)
    t, e = _scaled_pow(ql if from_low else pl, trials)
    total = np.ldexp(t, e)
    steps = (last + 1) if from_low else (trials - last + 1)
    j = 0 if from_low else trials
    lo, hi = ld(2.0) ** -8192, ld(2.0) ** 8192
    for _ in range(steps - 1):
        if from_low:
            t = t * (ld(trials - j) / ld(j + 1)) * ratio
            j += 1
        else:
            t = t * (ld(j) / ld(trials - j + 1)) * ratio
            j -= 1
        if not lo < t < hi:  # renormalize mid-chain
            t, shift = np.frexp(t)
            e += int(shift)
        total = total + np.ldexp(t, e)
    return min(1.0, float(total))


def expected_recall_error(k: int, b: int, k_b: int) -> RecallEstimate:
    """Expected recall under equiprobable placement of top values.

    Expected recall is (1/k) * (k_b + sum_{i=k_b}^{k-1} F(k_b-1; i, 1/b))
    with F the binomial CDF at success probability 1/b.  The CDF terms
    are produced by one incremental pmf update per i (O(k_b) each), and
    the sum is accumulated with Neumaier compensation; relative error
    stays below 1e-10 for k up to 2**20.
    """
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    if not (1 <= k_b <= k):
        raise ValueError(f"k_b must lie in 1..k, got k_b={k_b}, k={k}")

    p = 1.0 / b
    q = 1.0 - p
    # pmf of Binom(i, p) for success counts 0..k_b-1, starting at i = k_b.
    pmf = [0.0] * k_b
    pmf[0] = q**k_b
    for j in range(1, k_b):
        pmf[j] = pmf[j - 1] * (k_b - j + 1) / j * (p / q) if q > 0.0 else 0.0

    total = 0.0
    comp = 0.0
    for _ in range(k_b, k):
        term = math.fsum(pmf)
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        # advance trials i -> i+1: P(X=j) = old[j]*q + old[j-1]*p
        prev = pmf[0]
        pmf[0] = prev * q
        for j in range(1, k_b):
            cur = pmf[j]
            pmf[j] = cur * q + prev * p
            prev = cur

    recall = (k_b + (total + comp)) / k
    recall = min(1.0, max(0.0, recall))
    return RecallEstimate(expected_recall=recall, expected_error=1.0 - recall)


def expected_recall_kb1(k: int, b: int) -> float:
    """Closed form of the placement model at k_b = 1:
    (b/k) * (1 - ((b-1)/b)**k)."""
    if b < 1 or k < 1:
        raise ValueError(f"k and b must be >= 1, got k={k}, b={b}")
    if b == 1:
        return 1.0 / k
    return (b / k) * -math.expm1(k * math.log1p(-1.0 / b))


def worst_case_recall_error(n: int, k: int, b: int, k_b: int) -> float:
    """Recall error when the k top values concentrate in the fewest
    possible buckets: 1 - (floor(b*k/n)*k_b + min(k_b, k mod (n/b))) / k.

    n/b is taken as a real number for ragged configurations.  The
    recovered count is clamped to [0, k] so the error stays in [0, 1].
    """
    recovered = (b * k // n) * k_b + min(k_b, math.fmod(k, n / b))
    recovered = min(float(k), max(0.0, recovered))
    return 1.0 - recovered / k


def _indices_of(row) -> np.ndarray:
    if isinstance(row, TopKResult):
        if row.m != 1:
            raise ValueError("pass a single-row result or a row sequence")
        return row.indices[0]
    if len(row) and isinstance(row[0], ScoredIndex):
        return np.array([e.index for e in row], dtype=np.int64)
    return np.asarray(row, dtype=np.int64)


def empirical_recall(approx_row, truth_row, k: int) -> float:
    """|approx index set ∩ truth index set| / k for one row.

    Rows may be lists of ScoredIndex (from ``TopKResult.row``),
    single-row TopKResults, or plain index arrays.
    """
    a = _indices_of(approx_row)
    t = _indices_of(truth_row)
    if a.shape[0] != k or t.shape[0] != k:
        raise ValueError(f"rows must each hold k={k} entries, got {a.shape[0]} and {t.shape[0]}")
    return np.intersect1d(a, t).size / k


def empirical_recall_rows(approx: TopKResult, truth: TopKResult) -> np.ndarray:
    """Per-row recall of a batch result against the oracle result."""
    if approx.values.shape != truth.values.shape:
        raise ValueError("results must have identical (m, k) shapes")
    k = truth.k
    hits = np.zeros(approx.m)
    t_sorted = np.sort(truth.indices, axis=1)
    for r in range(approx.m):
        pos = np.searchsorted(t_sorted[r], approx.indices[r])
        pos = np.clip(pos, 0, k - 1)
        hits[r] = np.count_nonzero(t_sorted[r, pos] == approx.indices[r])
    return hits / k


def monte_carlo_recall(
    shape: ProblemShape,
    scheme: BucketScheme,
    trials: int,
    seed: int = 0,
    mode: ExecutionMode = PerBucket(),
    block_rows: int = 4096,
) -> MonteCarloRecall:
    """Mean recall (with standard error) over i.i.d. unit-normal rows.

    Each trial is one length-n row drawn from its own substream of the
    seed, so the estimate is independent of block size or scheduling.
    ``shape.m`` plays no role here; trials are the rows.
    """
    validate(shape, scheme)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    recalls = np.empty(trials)
    done = 0
    while done < trials:
        rows = min(block_rows, trials - done)
        x = simdata._normal_rows(seed, done, rows, shape.n)
        got = approx_topk(x, shape.k, scheme, mode)
        want = exact_topk_oracle(x, shape.k)
        recalls[done : done + rows] = empirical_recall_rows(got, want)
        done += rows
    mean = float(recalls.mean())
    stderr = float(recalls.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloRecall(mean_recall=mean, stderr=stderr, trials=trials)
