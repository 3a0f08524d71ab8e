#!/usr/bin/env python3
"""Inside the spatial-guided absorber: locality of the attention mask.

A tiny 12x12 anchor frame attends to P-tokens pooled on a 3x3 grid. The
Chebyshev neighborhood mask keeps every anchor's attention strictly local;
anchors near a moving region mix in its P-token evidence, anchors whose
neighborhood holds no P-token pass through the layer norm untouched.
"""

import numpy as np

from freres import (
    AbsorberWeights,
    NeighborhoodMask,
    absorb,
    attention_matrix,
    build_mask,
    cell_center,
)

rng = np.random.default_rng(0)
d = 8
grid, pool = (12, 12), (3, 3)

# Anchors on the full grid; P-tokens only where something moved: three
# pooled cells in the lower-right area.
anchor_coords = np.array([(r, c) for r in range(12) for c in range(12)])
p_cells = [(2, 2), (2, 1), (1, 2)]
p_coords = np.array([cell_center(r, c, grid, pool) for r, c in p_cells])

anchors = rng.normal(size=(len(anchor_coords), d))
p_tokens = rng.normal(size=(len(p_cells), d))

radius = 3.0
mask = build_mask(anchor_coords, p_coords, radius)
print(f"mask: {mask.allowed.shape[0]} anchors x {mask.allowed.shape[1]} P-tokens, "
      f"radius {radius}")
print(f"anchors with at least one visible P-token: {mask.allowed.any(axis=1).sum()}")
print()

eye = np.eye(d)
w = AbsorberWeights(w_q=eye, w_k=eye, w_v=eye,
                    ln_scale=np.ones(d), ln_shift=np.zeros(d))
weights = attention_matrix(anchors, p_tokens, w, mask)

print("total attention mass received per grid position (rows x cols):")
mass = weights.sum(axis=1).reshape(12, 12)
for r in range(12):
    print("  " + " ".join("." if mass[r, c] == 0 else "#" for c in range(12)))
print()
print("the '#' block hugs the three active pooled cells; everything else")
print("is fully masked and keeps its anchor embedding (up to layer norm).")

out = absorb(anchors, p_tokens, w, mask)
moved = np.abs(out - absorb(anchors, np.zeros((0, d)),
                            w, NeighborhoodMask(allowed=np.zeros((144, 0), bool), radius=radius)))
print(f"anchors changed by absorption: {(moved.max(axis=1) > 1e-9).sum()} of 144")
