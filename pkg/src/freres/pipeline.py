"""End-to-end encoder: anchors, pruning, budget, residual DCT, fusion.

One call runs the full budget-adaptive construction in order: input
validation, anchor selection, per-anchor block pruning, budget resolution,
per-group residual pooling and DCT with coefficient retention, energy
filtering, summary and static emission, then mode-dependent fusion
(optionally absorbing P-token evidence into the anchors, or reconstructing
residuals through the inverse transform).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .absorber import (
    DEFAULT_RADIUS,
    AbsorberWeights,
    NeighborhoodMask,
    absorb,
    build_mask,
    cell_center,
)
from .anchors import DEFAULT_TAU, AnchorSet, block_prune, retain_top_energy, select_anchors
from .budget import BudgetRequest, CompressionPlan, allocate
from .errors import BudgetTooSmall
from .fusion import FusionConfig, FusionMode, fuse
from .io import CodecWeights
from .model import LatentSequence, Token, TokenKind, TokenStream, validate
from .temporal import (
    DEFAULT_EPS_REL,
    DEFAULT_POOL_GRID,
    FrequencyBlock,
    compress_gop,
    energy_filter,
    group_frames,
    idct2,
    pool_frames,
    static_token_cells,
    summary_vectors,
)

__all__ = ["EncodeOptions", "EncodeReport", "run_pipeline"]


@dataclass(frozen=True)
class EncodeOptions:
    """Pipeline knobs; None fields derive from the others."""

    budget: int
    anchors: int
    k_raw: int = 512
    k_max: int = 3
    groups: int | None = None  # planner group count; defaults to anchors
    pool_grid: tuple[int, int] = DEFAULT_POOL_GRID
    summary_budget: int | None = None  # defaults to groups
    static_budget: int = 24
    static_grid: tuple[int, int] | None = None  # defaults to pool_grid
    tau: float = DEFAULT_TAU
    radius: float = DEFAULT_RADIUS
    eps_rel: float = DEFAULT_EPS_REL


@dataclass
class EncodeReport:
    """Accounting for one encode: plan, realized counts, branch activity."""

    mode: str
    total_frames: int
    grid: tuple[int, int]
    dim: int
    anchor_indices: tuple[int, ...]
    uniform_anchors: int
    event_anchors: int
    spatial_budget: int
    freq_budget: int
    k: int
    group_length: int
    predicted_max_tokens: int
    candidates: int
    survivors: int
    filter_threshold: float
    dct_positions: int  # pooled positions actually transformed
    counts: dict = field(default_factory=dict)
    total_tokens: int = 0
    baseline_tokens: int = 0
    compression: float = float("nan")
    within_budget: bool = True

    def to_text(self) -> str:
        lines = [
            "# freres encode report v1",
            f"mode={self.mode}",
            f"frames={self.total_frames}",
            f"grid={self.grid[0]}x{self.grid[1]}",
            f"dim={self.dim}",
            f"anchors={','.join(str(i) for i in self.anchor_indices)}",
            f"uniform_anchors={self.uniform_anchors}",
            f"event_anchors={self.event_anchors}",
            f"spatial_budget={self.spatial_budget}",
            f"freq_budget={self.freq_budget}",
            f"k={self.k}",
            f"group_length={self.group_length}",
            f"predicted_max_tokens={self.predicted_max_tokens}",
            f"candidates={self.candidates}",
            f"survivors={self.survivors}",
            f"filter_threshold={self.filter_threshold:.9g}",
            f"dct_positions={self.dct_positions}",
        ]
        for kind in TokenKind:
            lines.append(f"count_{kind.value}={self.counts.get(kind, 0)}")
        lines.append(f"total_tokens={self.total_tokens}")
        lines.append(f"baseline_tokens={self.baseline_tokens}")
        lines.append(f"compression={self.compression:.9g}")
        lines.append(f"within_budget={str(self.within_budget).lower()}")
        return "\n".join(lines) + "\n"


def _resolve_plan(
    opts: EncodeOptions, mode: FusionMode, groups_n: int, summary_n: int, l_group: int
) -> tuple[int, int, int, int]:
    """(spatial_budget, freq_budget, k, predicted_max) for the given mode."""
    if mode is FusionMode.SPATIAL_ONLY:
        spatial = opts.anchors * opts.k_raw
        if opts.budget < spatial:
            raise BudgetTooSmall(f"budget {opts.budget} < spatial reservation {spatial}")
        return spatial, 0, 0, spatial
    anchors = 0 if mode is FusionMode.TEMPORAL_ONLY else opts.anchors
    req = BudgetRequest(
        budget=opts.budget,
        anchors=anchors,
        k_raw=opts.k_raw,
        summary_budget=summary_n,
        static_budget=opts.static_budget,
        groups=groups_n,
        pool_positions=opts.pool_grid[0] * opts.pool_grid[1],
        k_max=opts.k_max,
        group_length=l_group,
    )
    plan: CompressionPlan = allocate(req)
    return plan.spatial_budget, plan.freq_budget, plan.k, plan.predicted_max_tokens


def _raw_branch(seq: LatentSequence, anchors: AnchorSet, k_raw: int) -> list[Token]:
    tokens = []
    for a in anchors.indices:
        pruned = retain_top_energy(block_prune(seq.frames[a], frame_index=a), k_raw)
        for coord, emb in pruned.kept:
            tokens.append(Token(kind=TokenKind.RAW_ANCHOR, embedding=emb,
                                frame=coord.frame, row=coord.row, col=coord.col))
    return tokens


def _reconstructed_tokens(
    seq: LatentSequence,
    gops,
    blocks: list[FrequencyBlock],
    surviving_positions: set,
    pool_grid: tuple[int, int],
) -> list[Token]:
    """One token per (group, surviving cell, P-frame): pooled anchor + iDCT residual.

    This deliberately re-densifies the temporal axis; it exists as the
    reconstruction-fusion reference mode.
    """
    ph, pw = pool_grid
    by_index = {b.gop: b for b in blocks}
    out = []
    for gop in gops:
        b = by_index.get(gop.index)
        if b is None or b.k == 0 or len(gop.p_frames) == 0:
            continue
        anchor_pooled = pool_frames(seq.frames[gop.anchor], pool_grid).reshape(ph * pw, seq.dim)
        padded_len = max(b.trajectory_length, b.k)
        full = np.zeros((padded_len, b.n_positions, seq.dim), dtype=np.float64)
        full[: b.k] = b.coeffs.astype(np.float64)
        recon = idct2(full)  # (padded_len, P, d); entries past L are padding
        for p in range(b.n_positions):
            if (gop.index, p) not in surviving_positions:
                continue
            r, c = divmod(p, pw)
            for l, frame in enumerate(gop.p_frames):
                emb = (anchor_pooled[p] + recon[l, p]).astype(np.float32)
                out.append(Token(kind=TokenKind.DYNAMIC_P, embedding=emb,
                                 gop=gop.index, frame=frame, row=r, col=c))
    return out


def run_pipeline(
    seq: LatentSequence,
    opts: EncodeOptions,
    cfg: FusionConfig,
    weights: CodecWeights,
) -> tuple[TokenStream, EncodeReport]:
    """Encode one latent sequence into a fused token stream plus accounting."""
    validate(seq)
    mode = cfg.mode
    anchors = select_anchors(seq, opts.anchors, opts.tau)
    gops = group_frames(anchors, seq.num_frames)
    ph, pw = opts.pool_grid
    static_grid = opts.static_grid or opts.pool_grid
    groups_n = opts.groups if opts.groups is not None else opts.anchors
    summary_n = opts.summary_budget if opts.summary_budget is not None else groups_n

    longest = max((len(g) for g in gops), default=0)
    # Short groups are zero-padded up to the coefficient count, so the
    # effective temporal resolution is never below k_max.
    l_group = max(longest, opts.k_max)

    spatial_budget, freq_budget, k, predicted = _resolve_plan(opts, mode, groups_n, summary_n, l_group)

    raw_tokens: list[Token] = []
    if mode is not FusionMode.TEMPORAL_ONLY:
        raw_tokens = _raw_branch(seq, anchors, opts.k_raw)

    freres_tokens: list[Token] = []
    candidates = 0
    survivors: list = []
    threshold = 0.0
    dct_positions = 0
    blocks: list[FrequencyBlock] = []
    if mode is not FusionMode.SPATIAL_ONLY and any(len(g) > 0 for g in gops):
        for gop in gops:
            if len(gop) == 0:
                blocks.append(FrequencyBlock.empty(gop.index, opts.pool_grid, seq.dim))
            else:
                b = compress_gop(gop, seq, opts.pool_grid, k)
                blocks.append(b)
                candidates += b.k * b.n_positions
                dct_positions += b.n_positions
        survivors, threshold = energy_filter(blocks, opts.eps_rel)
        by_index = {b.gop: b for b in blocks}
        if mode is FusionMode.IDCT_RECONSTRUCT:
            surviving_positions = {(g, p) for g, p, _ in survivors}
            freres_tokens.extend(
                _reconstructed_tokens(seq, gops, blocks, surviving_positions, opts.pool_grid)
            )
        else:
            for g, p, c in survivors:
                b = by_index[g]
                r, ccol = divmod(p, pw)
                freres_tokens.append(Token(kind=TokenKind.DYNAMIC_P, embedding=b.coeffs[c, p],
                                           gop=g, row=r, col=ccol, coeff=c))
        for gop, vec in zip(gops, summary_vectors(blocks, seq.dim)):
            freres_tokens.append(Token(kind=TokenKind.SUMMARY, embedding=vec, gop=gop.index))
        first_anchor = anchors.indices[0]
        for r, c, emb in static_token_cells(seq, gops, opts.static_budget, static_grid):
            freres_tokens.append(Token(kind=TokenKind.STATIC, embedding=emb,
                                       frame=first_anchor, row=r, col=c))

    if mode is FusionMode.ABSORBER and raw_tokens and freres_tokens:
        raw_tokens = _absorbed_raw(seq, raw_tokens, freres_tokens, gops, opts, weights)

    stream = fuse(raw_tokens, freres_tokens, cfg, weights)

    total = stream.budget_used
    baseline = seq.num_frames * seq.grid[0] * seq.grid[1]
    report = EncodeReport(
        mode=mode.value,
        total_frames=seq.num_frames,
        grid=seq.grid,
        dim=seq.dim,
        anchor_indices=anchors.indices,
        uniform_anchors=anchors.uniform_count,
        event_anchors=anchors.event_count,
        spatial_budget=spatial_budget,
        freq_budget=freq_budget,
        k=k,
        group_length=l_group,
        predicted_max_tokens=predicted,
        candidates=candidates,
        survivors=len(survivors),
        filter_threshold=threshold,
        dct_positions=dct_positions,
        counts=dict(stream.counts),
        total_tokens=total,
        baseline_tokens=baseline,
        compression=(baseline / total) if total else float("nan"),
        within_budget=total <= opts.budget,
    )
    return stream, report


def _absorbed_raw(
    seq: LatentSequence,
    raw_tokens: list[Token],
    freres_tokens: list[Token],
    gops,
    opts: EncodeOptions,
    weights: CodecWeights,
) -> list[Token]:
    """Inject surviving P-token evidence into the anchors, count-neutrally.

    An anchor attends only to P-tokens of its own group (founded on the
    anchor frame) within the Chebyshev radius; pooled cells compare at
    their patch-center coordinates.
    """
    p_tokens = [t for t in freres_tokens if t.kind is TokenKind.DYNAMIC_P]
    gop_of_anchor = {g.anchor: g.index for g in gops}
    anchor_mat = np.stack([t.embedding for t in raw_tokens]).astype(np.float64)
    # Zero surviving P-tokens still mean the absorber ran: anchors pass
    # through its layer norm with nothing mixed in.
    p_mat = (
        np.stack([t.embedding for t in p_tokens]).astype(np.float64)
        if p_tokens else np.zeros((0, seq.dim), dtype=np.float64)
    )
    a_coords = np.array([(t.row, t.col) for t in raw_tokens], dtype=np.int64)
    p_coords = np.array(
        [cell_center(t.row, t.col, seq.grid, opts.pool_grid) for t in p_tokens], dtype=np.int64
    ).reshape(-1, 2)
    mask = build_mask(a_coords, p_coords, opts.radius)
    a_gop = np.array([gop_of_anchor[t.frame] for t in raw_tokens], dtype=np.int64)
    p_gop = np.array([t.gop for t in p_tokens], dtype=np.int64)
    allowed = mask.allowed & (a_gop[:, None] == p_gop[None, :])
    aw = AbsorberWeights(
        w_q=weights.w_q, w_k=weights.w_k, w_v=weights.w_v,
        ln_scale=weights.ln_scale, ln_shift=weights.ln_shift, ln_eps=weights.ln_eps,
    )
    absorbed = absorb(anchor_mat, p_mat, aw, NeighborhoodMask(allowed=allowed, radius=mask.radius))
    return [
        Token(kind=t.kind, embedding=absorbed[i].astype(np.float32),
              gop=t.gop, frame=t.frame, row=t.row, col=t.col, coeff=t.coeff)
        for i, t in enumerate(raw_tokens)
    ]
