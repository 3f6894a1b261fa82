"""A complete tour of the two-stage selection on one tiny row.

Eleven scores, three interleaved buckets, two survivors per bucket,
then the final top-4 over the six survivors.  Prints every
intermediate so the algorithm can be followed by eye.
"""

import numpy as np

from bucketed_topk import (
    Assignment,
    BucketScheme,
    ProblemShape,
    approx_topk,
    bucket_of,
    bucket_sizes,
    empirical_recall,
    exact_topk_oracle,
    stage1,
    validate,
)

row = np.array([11.0, 3.0, 10.0, 6.0, 1.0, 4.0, 8.0, 5.0, 2.0, 9.0, 7.0])
n, k = row.shape[0], 4
scheme = BucketScheme(b=3, k_b=2, assignment=Assignment.INTERLEAVED)

validate(ProblemShape(m=1, n=n, k=k), scheme)
print(f"input row ({n} scores): {row.tolist()}")
print(f"scheme: b={scheme.b} buckets, k_b={scheme.k_b} kept per bucket, "
      f"{scheme.assignment.value} assignment")
print(f"bucket sizes: {bucket_sizes(n, scheme.b, scheme.assignment).tolist()}")

for j in range(scheme.b):
    members = [i for i in range(n) if bucket_of(i, n, scheme.b, scheme.assignment) == j]
    print(f"  bucket {j}: positions {members} -> values {[row[i] for i in members]}")

cands = stage1(row, scheme)
print(f"\nstage 1 keeps the top-{scheme.k_b} of each bucket:")
print(f"  candidates (bucket order): {cands.values[0].tolist()} "
      f"at positions {cands.indices[0].tolist()}")

got = approx_topk(row, k, scheme)
truth = exact_topk_oracle(row, k)
print(f"\nstage 2 takes the top-{k} of the {cands.count_per_row} candidates:")
print(f"  approximate top-{k}: {got.values[0].tolist()}")
print(f"  exact top-{k}:       {truth.values[0].tolist()}")

recall = empirical_recall(got.row(0), truth.row(0), k)
print(f"\nrecall = |approx ∩ exact| / k = {recall}")
print("the 8 was lost: it shared bucket 0 with both 11 and 9, and only "
      "two values per bucket survive stage 1")
