"""Core data types: latent sequences, grid coordinates, typed tokens, token streams.

A latent sequence is T frames of grid-arranged d-dimensional embeddings,
stored as a float32 array of shape (T, H, W, d). All types are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteValue, ShapeMismatch

__all__ = [
    "LatentSequence",
    "GridCoord",
    "TokenKind",
    "Token",
    "TokenStream",
    "validate",
]


class TokenKind(enum.Enum):
    RAW_ANCHOR = "raw_anchor"
    DYNAMIC_P = "dynamic_p"
    SUMMARY = "summary"
    STATIC = "static"


@dataclass(frozen=True)
class GridCoord:
    """Position of one token: frame index plus (row, col) in the frame grid."""

    frame: int
    row: int
    col: int


@dataclass(frozen=True)
class LatentSequence:
    """T frames of (H x W) latent token embeddings of width d.

    ``frames`` has shape (T, H, W, d), float32. ``fps`` is metadata only;
    0 means unknown.
    """

    frames: np.ndarray
    fps: float = 0.0

    def __post_init__(self):
        try:
            arr = np.asarray(self.frames, dtype=np.float32)
        except ValueError as e:
            # Ragged input (frames with differing grids) cannot form a tensor.
            raise ShapeMismatch(f"frames do not form a rectangular tensor: {e}") from e
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def grid(self) -> tuple[int, int]:
        return self.frames.shape[1], self.frames.shape[2]

    @property
    def dim(self) -> int:
        return self.frames.shape[3]


def validate(seq: LatentSequence) -> None:
    """Check sequence invariants; raise on violation, otherwise return None.

    Raises ShapeMismatch for a malformed tensor and NonFiniteValue when any
    embedding entry is NaN or infinite. Idempotent and side-effect free.
    """
    arr = seq.frames
    if arr.ndim != 4:
        raise ShapeMismatch(f"expected a (T, H, W, d) tensor, got shape {arr.shape}")
    t, h, w, d = arr.shape
    if t < 1 or h < 1 or w < 1 or d < 1:
        raise ShapeMismatch(f"all dimensions must be >= 1, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteValue("latent sequence contains NaN or Inf")


# Sentinel for origin fields that do not apply to a token kind.
NOT_SET = -1


@dataclass(frozen=True)
class Token:
    """One output token with its provenance coordinates.

    Which origin fields are meaningful depends on ``kind``:

    * RAW_ANCHOR: frame, row, col (grid position in the anchor frame).
    * DYNAMIC_P:  gop, row, col (pooled cell), coeff (frequency index);
      reconstructed variants carry frame instead of coeff.
    * SUMMARY:    gop.
    * STATIC:     frame (source anchor), row, col (static-grid cell).

    Unused fields hold -1.
    """

    kind: TokenKind
    embedding: np.ndarray
    gop: int = NOT_SET
    frame: int = NOT_SET
    row: int = NOT_SET
    col: int = NOT_SET
    coeff: int = NOT_SET

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=np.float32)
        if emb.ndim != 1:
            raise ShapeMismatch(f"token embedding must be 1-D, got shape {emb.shape}")
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)


@dataclass(frozen=True)
class TokenStream:
    """Ordered token list with per-kind totals."""

    tokens: tuple[Token, ...]
    counts: dict = field(default_factory=dict)

    @classmethod
    def from_tokens(cls, tokens) -> "TokenStream":
        toks = tuple(tokens)
        counts = {kind: 0 for kind in TokenKind}
        for t in toks:
            counts[t.kind] += 1
        return cls(tokens=toks, counts=counts)

    @property
    def budget_used(self) -> int:
        return len(self.tokens)

    def count(self, kind: TokenKind) -> int:
        return self.counts.get(kind, 0)
