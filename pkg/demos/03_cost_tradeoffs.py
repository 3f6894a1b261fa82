"""Cost-vs-error trade-off curves under the three abstract machines.

Reproduces the two operating regimes: with small k relative to n, the
cheapest way to buy recall is more buckets at k_b = 1; once k is a
sizeable fraction of n, stage 2 (over b*k_b survivors) dominates and
raising k_b while keeping b*k_b = k wins.
"""

from bucketed_topk import CostModelKind, exact_cost, tradeoff_curve

N = 2**20


def show_curve(model, k, k_b_list=(1, 2, 4, 8), ratios=(1, 2, 4, 8)):
    print(f"\n{model.value} model, n=2^20, k={k}  "
          f"(exact cost {exact_cost(model, N, k, 1):.3g})")
    print(f"{'k_b':>4} {'ratio':>6} {'b':>8} {'rel cost':>9} {'E[error]':>9}")
    pts = tradeoff_curve(model, N, k, list(k_b_list), list(ratios))
    for p in pts:
        print(f"{p.k_b:>4} {p.ratio:>6.1f} {p.b:>8} "
              f"{p.relative_cost:>9.4f} {p.expected_error:>9.5f}")
    return pts


def cheapest_at(pts, level):
    good = [p for p in pts if p.expected_error <= level]
    return min(good, key=lambda p: p.relative_cost) if good else None


small = show_curve(CostModelKind.SERIAL, 256)
large = show_curve(CostModelKind.SERIAL, N // 8)

print("\ncheapest configuration meeting an error budget (serial model):")
print(f"{'budget':>8} {'k=256':>16} {'k=n/8':>16}")
for level in (0.30, 0.15, 0.05, 0.01):
    s = cheapest_at(small, level)
    l = cheapest_at(large, level)
    fmt = lambda p: f"kb={p.k_b} r={p.ratio:g}" if p else "-"
    print(f"{level:>8.2f} {fmt(s):>16} {fmt(l):>16}")

print("\nreading: at loose budgets the small-k column stays at k_b=1 and")
print("buys buckets, while the large-k column pins ratio=1 to avoid the")
print("stage-2 bill; tight budgets eventually push both toward larger k_b.")

print("\nsame sweep under the parallel (infinite-thread) machine:")
show_curve(CostModelKind.PARALLEL, 256, ratios=(1, 2, 4))
print("\nstage 2 is comparatively expensive here, so k_b drives quality.")
