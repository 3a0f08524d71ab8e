#!/usr/bin/env python3
"""Why temporal-frequency compression works: residual energy spectra.

Generates the five synthetic clip families, computes the DCT energy
spectrum of their pooled anchor-relative residual trajectories, and
prints the top-5 concentration per family. Real video-like content piles
its residual energy into a handful of low-frequency coefficients; white
noise spreads it flat. That gap is the entire basis for keeping only the
first K coefficients per pooled position.
"""

import numpy as np

from freres import SyntheticSpec, energy_spectrum, gen_synthetic, select_anchors

SEEDS = range(25)
KINDS = ["static", "slow", "fast", "scenecut", "noise"]

print("top-5 residual-energy concentration, 16-frame clips, single group")
print(f"{'kind':<10} {'mean':>8} {'min':>8} {'max':>8}")
for kind in KINDS:
    ratios = []
    for seed in SEEDS:
        seq = gen_synthetic(SyntheticSpec(kind=kind, frames=16, grid=(24, 24), dim=8, seed=seed))
        anchors = select_anchors(seq, 1, tau=2.0)  # one group spanning the clip
        report = energy_spectrum(seq, anchors, (4, 4))
        ratios.append(report.topk_ratio(5))
    r = np.array(ratios)
    print(f"{kind:<10} {r.mean():>8.4f} {r.min():>8.4f} {r.max():>8.4f}")

print()
print("per-coefficient profile of one slow clip vs one noise clip")
slow = gen_synthetic(SyntheticSpec(kind="slow", frames=16, grid=(24, 24), dim=8, seed=0))
noise = gen_synthetic(SyntheticSpec(kind="noise", frames=16, grid=(24, 24), dim=8, seed=0))
for name, seq in (("slow", slow), ("noise", noise)):
    rep = energy_spectrum(seq, select_anchors(seq, 1, tau=2.0), (4, 4))
    frac = rep.per_coeff_energy / rep.per_coeff_energy.sum()
    bars = " ".join(f"{f:.3f}" for f in frac[:8])
    print(f"{name:<6} first 8 coeff fractions: {bars} ...")

print()
print("a scene cut concentrates poorly across the cut, but event-aware")
print("anchoring resets the reference frame and restores smooth residuals:")
cut = gen_synthetic(SyntheticSpec(kind="scenecut", frames=16, grid=(24, 24), dim=8, seed=3))
blind = energy_spectrum(cut, select_anchors(cut, 1, tau=2.0), (4, 4))
aware = energy_spectrum(cut, select_anchors(cut, 1, tau=0.3), (4, 4))
print(f"  single anchor     top-5 = {blind.topk_ratio(5):.4f}")
print(f"  event-aware (tau=0.3) top-5 = {aware.topk_ratio(5):.4f}")
