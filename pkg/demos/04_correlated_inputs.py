"""Bucket assignment under serially-correlated inputs.

AR(1) sequences with correlation rho^|i-j| model score vectors whose
neighbours look alike.  Contiguous buckets then collect whole runs of
large values and recall collapses; interleaving (or shuffling first)
breaks the runs apart.
"""

import numpy as np

from bucketed_topk import (
    Assignment,
    BucketScheme,
    approx_topk,
    ar1_batch,
    empirical_recall_rows,
    exact_topk_oracle,
    permute,
)

n, k, k_b, trials, seed = 2048, 256, 1, 400, 0
b = k // k_b

print(f"n={n}, k={k}, b={b}, k_b={k_b}, {trials} trials per point\n")
print(f"{'rho':>5} {'interleaved':>12} {'contiguous':>11} {'shuffled-contig':>16}")
for rho in (0.0, 0.5, 0.9, 0.99):
    data = ar1_batch(trials, n, rho, seed=seed)
    shuffled = np.stack([permute(data[t], seed=seed, row=t) for t in range(trials)])
    means = {}
    for label, x, assignment in [
        ("inter", data, Assignment.INTERLEAVED),
        ("contig", data, Assignment.CONTIGUOUS),
        ("shuffled", shuffled, Assignment.CONTIGUOUS),
    ]:
        scheme = BucketScheme(b=b, k_b=k_b, assignment=assignment)
        recall = empirical_recall_rows(
            approx_topk(x, k, scheme), exact_topk_oracle(x, k)
        )
        means[label] = recall.mean()
    print(f"{rho:>5.2f} {means['inter']:>12.4f} {means['contig']:>11.4f} "
          f"{means['shuffled']:>16.4f}")

print("""
contiguous assignment degrades sharply as correlation grows, because a
bucket of consecutive positions captures an entire high run but may
only keep k_b of it.  Shuffling first restores the uncorrelated
recall level.  Interleaving goes one step further at high correlation:
as a systematic stride-b sample it spreads each run across many
buckets, beating even random placement.""")

# the lag profile behind the effect
x = ar1_batch(2000, 64, 0.99, seed=1)
lags = [1, 8, 64 - 1]
cors = [float(np.mean(x[:, :-l] * x[:, l:])) for l in lags]
print(f"\nAR(1) rho=0.99 autocovariance at lags {lags}: "
      f"{[round(c, 3) for c in cors]}")
print(f"theory rho^lag: {[round(0.99**l, 3) for l in lags]}")
