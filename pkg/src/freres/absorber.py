"""Spatial-guided absorber: local masked cross-attention over anchor tokens.

Anchor tokens are queries; temporal-frequency P-tokens are keys and
values. A P-token is visible to an anchor only if their grid positions
are within a Chebyshev radius (pooled cells map to their patch-center
token coordinate first). Attention output is added back onto the anchors
under a layer norm, so absorption never changes the anchor count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

__all__ = [
    "AbsorberWeights",
    "NeighborhoodMask",
    "cell_center",
    "build_mask",
    "attention_matrix",
    "masked_cross_attention",
    "absorb",
    "DEFAULT_RADIUS",
]

DEFAULT_RADIUS = 6.0


@dataclass(frozen=True)
class AbsorberWeights:
    """Projection matrices and layer-norm parameters for one absorber."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    ln_scale: np.ndarray
    ln_shift: np.ndarray
    ln_eps: float = 1e-5

    def __post_init__(self):
        d = self.w_q.shape[0]
        for name in ("w_q", "w_k", "w_v"):
            m = getattr(self, name)
            if m.shape != (d, d) or not np.isfinite(m).all():
                raise ShapeMismatch(f"{name} must be finite ({d}, {d}), got shape {m.shape}")
        if self.ln_scale.shape != (d,) or self.ln_shift.shape != (d,):
            raise ShapeMismatch("layer-norm vectors must have length d")

    @property
    def dim(self) -> int:
        return self.w_q.shape[0]


@dataclass(frozen=True)
class NeighborhoodMask:
    """Boolean visibility matrix: allowed[i, j] means anchor i sees P-token j."""

    allowed: np.ndarray  # (N_I, N_P) bool
    radius: float


def cell_center(cell_row: int, cell_col: int, grid: tuple[int, int], pool_grid: tuple[int, int]) -> tuple[int, int]:
    """Map a pooled cell to the center token coordinate of its patch.

    For even patch sizes the center rounds down, keeping coordinates
    integral so Chebyshev thresholds are tie-free.
    """
    h, w = grid
    ph, pw = pool_grid
    rh, rw = h // ph, w // pw
    return cell_row * rh + (rh - 1) // 2, cell_col * rw + (rw - 1) // 2


def build_mask(anchor_coords: np.ndarray, p_coords: np.ndarray, radius: float) -> NeighborhoodMask:
    """Chebyshev neighborhood mask over (row, col) coordinate arrays.

    ``anchor_coords`` is (N_I, 2) and ``p_coords`` is (N_P, 2), both already
    in token-grid units (pooled cells mapped to patch centers). Distance
    ignores time; temporal pairing is applied separately by the pipeline.
    """
    if radius < 0:
        raise ShapeMismatch(f"radius must be >= 0, got {radius}")
    a = np.asarray(anchor_coords, dtype=np.int64).reshape(-1, 2)
    p = np.asarray(p_coords, dtype=np.int64).reshape(-1, 2)
    if p.shape[0] == 0 or a.shape[0] == 0:
        return NeighborhoodMask(allowed=np.zeros((a.shape[0], p.shape[0]), dtype=bool), radius=radius)
    dr = np.abs(a[:, None, 0] - p[None, :, 0])
    dc = np.abs(a[:, None, 1] - p[None, :, 1])
    cheb = np.maximum(dr, dc)
    return NeighborhoodMask(allowed=cheb <= radius, radius=radius)


def layer_norm(x: np.ndarray, scale: np.ndarray, shift: np.ndarray, eps: float) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = ((x - mean) ** 2).mean(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps) * scale + shift


def _check_shapes(anchors: np.ndarray, p_tokens: np.ndarray, d: int, mask: NeighborhoodMask):
    if anchors.ndim != 2 or anchors.shape[1] != d:
        raise ShapeMismatch(f"anchors must be (N_I, {d}), got {anchors.shape}")
    if p_tokens.ndim != 2 or (p_tokens.shape[0] > 0 and p_tokens.shape[1] != d):
        raise ShapeMismatch(f"p_tokens must be (N_P, {d}), got {p_tokens.shape}")
    if mask.allowed.shape != (anchors.shape[0], p_tokens.shape[0]):
        raise ShapeMismatch(
            f"mask shape {mask.allowed.shape} does not match "
            f"({anchors.shape[0]}, {p_tokens.shape[0]})"
        )


def attention_matrix(
    anchors: np.ndarray,
    p_tokens: np.ndarray,
    w: AbsorberWeights,
    mask: NeighborhoodMask,
) -> np.ndarray:
    """(N_I, N_P) row-softmax weights; disallowed entries are exactly zero.

    Rows with no allowed entry come back all-zero (an empty softmax support
    is defined as zero absorption). Softmax is computed with a per-row
    shift for stability, which leaves the weights unchanged.
    """
    anchors = np.asarray(anchors, dtype=np.float64)
    p_tokens = np.asarray(p_tokens, dtype=np.float64)
    d = w.dim
    _check_shapes(anchors, p_tokens, d, mask)
    weights = np.zeros(mask.allowed.shape, dtype=np.float64)
    if p_tokens.shape[0] == 0:
        return weights
    q = anchors @ np.asarray(w.w_q, dtype=np.float64)
    k = p_tokens @ np.asarray(w.w_k, dtype=np.float64)
    logits = (q @ k.T) / np.sqrt(d)
    allowed = mask.allowed
    live = allowed.any(axis=1)
    if live.any():
        rows = np.where(allowed[live], logits[live], -np.inf)
        shifted = rows - rows.max(axis=1, keepdims=True)
        expd = np.exp(shifted)
        expd[~allowed[live]] = 0.0
        weights[live] = expd / expd.sum(axis=1, keepdims=True)
    return weights


def masked_cross_attention(
    anchors: np.ndarray,
    p_tokens: np.ndarray,
    w: AbsorberWeights,
    mask: NeighborhoodMask,
) -> np.ndarray:
    """Attention-weighted P-token values per anchor; (N_I, d) mixture."""
    anchors = np.asarray(anchors, dtype=np.float64)
    p_tokens = np.asarray(p_tokens, dtype=np.float64)
    if p_tokens.shape[0] == 0:
        _check_shapes(anchors, p_tokens, w.dim, mask)
        return np.zeros_like(anchors)
    weights = attention_matrix(anchors, p_tokens, w, mask)
    v = p_tokens @ np.asarray(w.w_v, dtype=np.float64)
    return weights @ v


def absorb(
    anchors: np.ndarray,
    p_tokens: np.ndarray,
    w: AbsorberWeights,
    mask: NeighborhoodMask,
) -> np.ndarray:
    """Motion-aware anchors: LayerNorm(anchors + attention mixture).

    Output row count always equals the anchor count. Fully masked anchors
    pass through as LayerNorm(anchor).
    """
    anchors = np.asarray(anchors, dtype=np.float64)
    mixed = masked_cross_attention(anchors, p_tokens, w, mask)
    return layer_norm(
        anchors + mixed,
        np.asarray(w.ln_scale, dtype=np.float64),
        np.asarray(w.ln_shift, dtype=np.float64),
        w.ln_eps,
    )
