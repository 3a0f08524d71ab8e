"""Hybrid token fusion: adapter, type embeddings, branch gates, stream order.

The raw-anchor branch is adapted into the fusion space and scaled by its
gate; the temporal-frequency branch is scaled by its own gate. Each token
then receives the type embedding of its kind, marking provenance after the
gates scale content. The fused stream is ordered deterministically: raw
anchors by (frame, row, col), then per group its dynamic P-tokens followed
by the group summary, then static tokens by cell.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import MissingWeights, ShapeMismatch
from .io import CodecWeights
from .model import Token, TokenKind, TokenStream

__all__ = ["FusionMode", "FusionConfig", "raw_adapter", "fuse"]


class FusionMode(enum.Enum):
    SPATIAL_ONLY = "spatial-only"
    TEMPORAL_ONLY = "temporal-only"
    CONCAT = "concat"
    IDCT_RECONSTRUCT = "idct"
    ABSORBER = "absorber"


@dataclass(frozen=True)
class FusionConfig:
    """Fusion mode plus optional gate overrides (None defers to the weights file)."""

    mode: FusionMode = FusionMode.ABSORBER
    g_raw: float | None = None
    g_freq: float | None = None


def raw_adapter(tokens: list[Token], w: CodecWeights) -> list[Token]:
    """Apply the adapter matrix to each embedding; coordinates are preserved.

    Rows are tokens and the matrix acts on the right, the same convention
    as the attention projections.
    """
    if not tokens:
        return []
    d = tokens[0].embedding.shape[0]
    if w.adapter.shape != (d, d):
        raise ShapeMismatch(f"adapter is {w.adapter.shape}, tokens have d={d}")
    a = np.asarray(w.adapter, dtype=np.float64)
    return [
        Token(
            kind=t.kind,
            embedding=(np.asarray(t.embedding, dtype=np.float64) @ a).astype(np.float32),
            gop=t.gop, frame=t.frame, row=t.row, col=t.col, coeff=t.coeff,
        )
        for t in tokens
    ]


def _retag(t: Token, embedding: np.ndarray) -> Token:
    return Token(
        kind=t.kind, embedding=embedding.astype(np.float32),
        gop=t.gop, frame=t.frame, row=t.row, col=t.col, coeff=t.coeff,
    )


def _order_raw(tokens: list[Token]) -> list[Token]:
    return sorted(tokens, key=lambda t: (t.frame, t.row, t.col))


def _order_freres(tokens: list[Token]) -> list[Token]:
    dynamic = [t for t in tokens if t.kind is TokenKind.DYNAMIC_P]
    summaries = {t.gop: t for t in tokens if t.kind is TokenKind.SUMMARY}
    statics = [t for t in tokens if t.kind is TokenKind.STATIC]
    gops = sorted({t.gop for t in dynamic} | set(summaries))
    out = []
    for g in gops:
        out.extend(
            sorted(
                (t for t in dynamic if t.gop == g),
                key=lambda t: (t.row, t.col, t.coeff, t.frame),
            )
        )
        if g in summaries:
            out.append(summaries[g])
    out.extend(sorted(statics, key=lambda t: (t.row, t.col)))
    return out


def fuse(
    raw_tokens: list[Token],
    freres_tokens: list[Token],
    cfg: FusionConfig,
    w: CodecWeights | None,
) -> TokenStream:
    """Assemble the fused visual-token stream for one sequence.

    Per branch the embedding becomes gate * branch_output + type_embedding:
    the raw branch output passes through the adapter first, the temporal
    branch is used as-is. SPATIAL_ONLY and TEMPORAL_ONLY emit a single
    branch; the dual modes emit raw anchors followed by the temporal
    stream. Callers supply mode-appropriate inputs (absorbed anchors for
    ABSORBER, reconstructed tokens for IDCT_RECONSTRUCT).
    """
    if w is None:
        raise MissingWeights("fusion requires codec weights (file or seeded)")
    g_raw = w.g_raw if cfg.g_raw is None else cfg.g_raw
    g_freq = w.g_freq if cfg.g_freq is None else cfg.g_freq

    out: list[Token] = []
    if cfg.mode is not FusionMode.TEMPORAL_ONLY:
        adapted = raw_adapter(_order_raw(raw_tokens), w)
        type_emb = w.type_embedding(TokenKind.RAW_ANCHOR).astype(np.float64)
        for t in adapted:
            out.append(_retag(t, g_raw * np.asarray(t.embedding, dtype=np.float64) + type_emb))
    if cfg.mode is not FusionMode.SPATIAL_ONLY:
        for t in _order_freres(freres_tokens):
            type_emb = w.type_embedding(t.kind).astype(np.float64)
            out.append(_retag(t, g_freq * np.asarray(t.embedding, dtype=np.float64) + type_emb))
    return TokenStream.from_tokens(out)
