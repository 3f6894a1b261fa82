"""Synthetic input generators: i.i.d. Gaussian batches, AR(1)-correlated
sequences, and seeded permutations.

Reproducibility contract
------------------------
All randomness comes from numpy's counter-based Philox bit generator.
A draw is keyed by ``(seed, stream, row)`` packed into the 128-bit
Philox key as ``(seed << 64) | (stream << 56) | row``:

* ``seed`` — the user-supplied 64-bit seed,
* ``stream`` — a fixed purpose tag (normals, shuffles, ...),
* ``row`` — the row within a batch.

Because every row has its own substream, batches can be generated in
any block size or order (or in parallel) and remain bit-identical.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

__all__ = ["iid_normal", "ar1_sequence", "ar1_batch", "permute", "derive_seed"]

_SEED_MASK = (1 << 64) - 1

# Purpose tags keep independent uses of the same seed from colliding.
_STREAM_NORMAL = 0
_STREAM_SHUFFLE = 1


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not (0 <= seed <= _SEED_MASK):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return int(seed)


def _keyed_rng(seed: int, stream: int, row: int) -> np.random.Generator:
    key = (seed << 64) | (stream << 56) | row
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, step: int) -> int:
    """A decorrelated 64-bit seed for iteration ``step`` of a seeded loop.

    SplitMix64 finalizer over seed + step * golden-ratio increment;
    used e.g. by the benchmark harness to refill inputs each iteration.
    """
    z = (_check_seed(seed) + (step + 1) * 0x9E3779B97F4A7C15) & _SEED_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _SEED_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _SEED_MASK
    return (z ^ (z >> 31)) & _SEED_MASK


def _normal_rows(seed: int, first_row: int, rows: int, n: int) -> np.ndarray:
    out = np.empty((rows, n), dtype=np.float64)
    for r in range(rows):
        out[r] = _keyed_rng(seed, _STREAM_NORMAL, first_row + r).standard_normal(n)
    return out


def iid_normal(m: int, n: int, seed: int = 0) -> np.ndarray:
    """(m, n) matrix of unit-normal draws, row r keyed by (seed, r)."""
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be >= 1, got m={m}, n={n}")
    return _normal_rows(_check_seed(seed), 0, m, n)


def ar1_batch(trials: int, n: int, rho: float, seed: int = 0) -> np.ndarray:
    """(trials, n) batch of stationary AR(1) sequences.

    Each row follows x_0 ~ N(0,1), x_i = rho*x_{i-1} + sqrt(1-rho^2)*e_i
    with e_i ~ N(0,1), giving unit marginal variance and covariance
    Cov(x_i, x_j) = rho^|i-j|.  The O(n) recursion is equivalent in law
    to drawing from the dense covariance directly.
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
    eps = iid_normal(trials, n, seed)
    if rho == 0.0:
        return eps
    driver = eps * np.sqrt(1.0 - rho * rho)
    driver[:, 0] = eps[:, 0]  # x_0 is a fresh unit normal
    return lfilter([1.0], [1.0, -rho], driver, axis=1)


def ar1_sequence(n: int, rho: float, seed: int = 0) -> np.ndarray:
    """A single length-n AR(1) sequence; see :func:`ar1_batch`."""
    return ar1_batch(1, n, rho, seed)[0]


def permute(vector: np.ndarray, seed: int = 0, row: int = 0) -> np.ndarray:
    """Uniform random permutation of a 1-D array, keyed by (seed, row).

    ``row`` selects a substream so per-trial shuffles inside a batch
    stay independent and schedule-invariant.
    """
    vector = np.asarray(vector)
    rng = _keyed_rng(_check_seed(seed), _STREAM_SHUFFLE, row)
    return vector[rng.permutation(vector.shape[0])]
