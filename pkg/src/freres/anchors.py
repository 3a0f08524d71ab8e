"""Anchor-frame selection and parameter-free 3x3 block pruning.

The anchor set is a uniform backbone of M evenly spaced frames plus every
frame whose latent cosine distance to its predecessor exceeds a threshold
(event promotion). Each anchor frame keeps 8/9 of its tokens: within every
3x3 grid block the single lowest-energy token is dropped. Token energy is
the squared L2 norm of its embedding throughout this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBudget, ShapeMismatch
from .model import GridCoord, LatentSequence

__all__ = ["AnchorSet", "PrunedFrame", "select_anchors", "block_prune", "retain_top_energy"]

DEFAULT_TAU = 0.3


@dataclass(frozen=True)
class AnchorSet:
    """Sorted unique anchor frame indices; uniform and event counts overlap freely."""

    indices: tuple[int, ...]
    uniform_count: int
    event_count: int
    tau: float

    def __len__(self) -> int:
        return len(self.indices)


def frame_vector(seq: LatentSequence, t: int) -> np.ndarray:
    """Mean token embedding of frame t, the frame's latent-space summary."""
    return np.asarray(seq.frames[t], dtype=np.float64).mean(axis=(0, 1))


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cosine similarity; any zero vector is at distance 1 from everything."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 1.0
    return 1.0 - float(np.dot(a, b)) / (na * nb)


def select_anchors(seq: LatentSequence, m: int, tau: float = DEFAULT_TAU) -> AnchorSet:
    """Uniform backbone of m anchors plus event-promoted frames.

    Uniform anchors sit at floor(i*T/m) for i in 0..m-1, so frame 0 is
    always an anchor. Every frame t >= 1 whose frame-vector cosine distance
    to frame t-1 exceeds tau is promoted as well. tau = 2 disables
    promotion (no cosine distance exceeds 2).
    """
    t_total = seq.num_frames
    if m < 1 or m > t_total:
        raise InvalidBudget(f"anchor count {m} outside [1, {t_total}]")
    uniform = [(i * t_total) // m for i in range(m)]
    events = []
    if tau < 2.0 and t_total > 1:
        vecs = [frame_vector(seq, t) for t in range(t_total)]
        for t in range(1, t_total):
            if cosine_distance(vecs[t], vecs[t - 1]) > tau:
                events.append(t)
    indices = tuple(sorted(set(uniform) | set(events)))
    return AnchorSet(indices=indices, uniform_count=len(set(uniform)), event_count=len(events), tau=tau)


@dataclass(frozen=True)
class PrunedFrame:
    """Surviving tokens of one anchor frame after per-block pruning."""

    kept: tuple  # of (GridCoord, embedding), in row-major grid order
    dropped_mask: np.ndarray  # (H, W) booleans, True where dropped
    frame: int


def token_energies(frame: np.ndarray) -> np.ndarray:
    """Squared L2 norm per token; (H, W) for an (H, W, d) frame."""
    return (np.asarray(frame, dtype=np.float64) ** 2).sum(axis=-1)


def block_prune(frame: np.ndarray, frame_index: int = 0) -> PrunedFrame:
    """Drop the lowest-energy token in each 3x3 block of an (H, W, d) frame.

    Ties break toward the lowest row-major index within the block. Both
    grid dimensions must be divisible by 3.
    """
    frame = np.asarray(frame)
    if frame.ndim != 3:
        raise ShapeMismatch(f"expected (H, W, d) frame, got shape {frame.shape}")
    h, w, _ = frame.shape
    if h % 3 or w % 3:
        raise ShapeMismatch(f"grid {h}x{w} not divisible into 3x3 blocks")
    energy = token_energies(frame)
    # (h//3, w//3, 3, 3) view of block energies; argmin over the flattened
    # block picks the first minimum in row-major order, the tie-break rule.
    blocks = energy.reshape(h // 3, 3, w // 3, 3).transpose(0, 2, 1, 3).reshape(h // 3, w // 3, 9)
    drop_flat = blocks.argmin(axis=-1)
    dropped = np.zeros((h, w), dtype=bool)
    br, bc = np.meshgrid(np.arange(h // 3), np.arange(w // 3), indexing="ij")
    rows = br * 3 + drop_flat // 3
    cols = bc * 3 + drop_flat % 3
    dropped[rows.ravel(), cols.ravel()] = True
    kept = tuple(
        (GridCoord(frame=frame_index, row=r, col=c), np.asarray(frame[r, c], dtype=np.float32))
        for r in range(h)
        for c in range(w)
        if not dropped[r, c]
    )
    return PrunedFrame(kept=kept, dropped_mask=dropped, frame=frame_index)


def retain_top_energy(pruned: PrunedFrame, k_raw: int) -> PrunedFrame:
    """Keep the k_raw highest-energy survivors, preserving grid order.

    Used when the per-anchor raw budget is below the 8/9 block-pruning
    yield. Energy ties break toward the earlier grid position.
    """
    if k_raw >= len(pruned.kept):
        return pruned
    energies = np.array([float((e.astype(np.float64) ** 2).sum()) for _, e in pruned.kept])
    order = np.argsort(-energies, kind="stable")[:k_raw]
    keep_idx = np.sort(order)
    kept = tuple(pruned.kept[i] for i in keep_idx)
    dropped = pruned.dropped_mask.copy()
    selected = set(int(i) for i in keep_idx)
    for i, (coord, _) in enumerate(pruned.kept):
        if i not in selected:
            dropped[coord.row, coord.col] = True
    return PrunedFrame(kept=kept, dropped_mask=dropped, frame=pruned.frame)
