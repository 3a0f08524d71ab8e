#!/usr/bin/env python3
"""Hierarchical budget allocation and context-token accounting.

The allocator reserves spatial anchors first (M * K_raw), then summary and
static tokens; whatever remains funds the temporal branch, whose retained
coefficient count K is floor(B_freq / (groups * positions)) capped by both
K_max and the group trajectory length. This demo sweeps the total budget
and shows K stepping up one coefficient at a time, then reproduces the
dense-video context-token ledger.
"""

from freres import BudgetRequest, BudgetTooSmall, account_context, allocate, compression_ratio

print("budget sweep, compact geometry: 8 anchors x 512 raw, 8 groups x 16 positions")
print(f"{'budget':>8} {'freq':>6} {'K':>3} {'predicted':>10}")
for budget in range(4130, 4900, 96):
    req = BudgetRequest(budget=budget, anchors=8, k_raw=512, summary_budget=8,
                        static_budget=24, groups=8, pool_positions=16,
                        k_max=5, group_length=3)
    try:
        plan = allocate(req)
        print(f"{budget:>8} {plan.freq_budget:>6} {plan.k:>3} {plan.predicted_max_tokens:>10}")
    except BudgetTooSmall as e:
        print(f"{budget:>8} -- too small ({e})")

print()
print("the compact 16-frame instantiation")
plan = allocate(BudgetRequest(budget=4512, anchors=8, k_raw=512, summary_budget=8,
                              static_budget=24, groups=8, pool_positions=16,
                              k_max=3, group_length=3))
print(f"  spatial {plan.spatial_budget}, freq {plan.freq_budget}, K={plan.k}, "
      f"candidates {8 * plan.k * 16}")
print(f"  realized streams land near 4413 tokens -> "
      f"{compression_ratio(9216, 4413):.2f}x below the 9216-token baseline")

print()
print("context tokens for one minute of dense 30-fps video (1800 frames)")
rows = [
    ("dense, full tokens", account_context(1800, 576, 22)),
    ("uniform 1-fps sampling", account_context(60, 576, 22)),
    ("frame-wise spatial 8x", account_context(1800, 72, 22)),
]
for name, total in rows:
    print(f"  {name:<26} {total:>10,}")
print("  anchors + temporal residuals cover the same input in ~46k tokens,")
print(f"  {compression_ratio(rows[0][1], 46_102):.1f}x fewer than dense ingestion")
