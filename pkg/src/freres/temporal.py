"""Temporal-frequency branch: GoP residual trajectories under a 1-D DCT-II.

Non-anchor frames are grouped behind their nearest preceding anchor. Each
group's residuals (frame minus anchor) are pooled onto a coarse spatial
grid, transformed along time with the orthonormal type-II DCT, and only
the first K low-frequency coefficients are kept. Near-silent pooled
positions are filtered out; each group also yields one summary token, and
the quietest positions yield static background tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .anchors import AnchorSet
from .errors import EmptyGop, ShapeMismatch
from .model import LatentSequence

__all__ = [
    "Gop",
    "FrequencyBlock",
    "group_frames",
    "dct2",
    "idct2",
    "dct_basis",
    "pool_frames",
    "compress_gop",
    "energy_filter",
    "summary_vectors",
    "static_token_cells",
    "DEFAULT_EPS_REL",
]

DEFAULT_EPS_REL = 0.05
DEFAULT_POOL_GRID = (4, 4)


@dataclass(frozen=True)
class Gop:
    """One anchor frame plus the P-frames that reference it."""

    anchor: int
    p_frames: tuple[int, ...]
    index: int

    def __len__(self) -> int:
        return len(self.p_frames)


def group_frames(anchors: AnchorSet, total_frames: int) -> list[Gop]:
    """Partition non-anchor frames into groups between neighboring anchors.

    Every non-anchor frame lands in exactly one group; groups with no
    P-frames are retained so downstream accounting sees one group per
    anchor.
    """
    idx = list(anchors.indices)
    gops = []
    for g, start in enumerate(idx):
        end = idx[g + 1] if g + 1 < len(idx) else total_frames
        gops.append(Gop(anchor=start, p_frames=tuple(range(start + 1, end)), index=g))
    return gops


@lru_cache(maxsize=128)
def dct_basis(length: int) -> np.ndarray:
    """Orthonormal DCT-II basis matrix C with C[k, n] = s_k cos(pi (2n+1) k / 2L)."""
    n = np.arange(length)
    k = np.arange(length)[:, None]
    c = np.cos(np.pi * (2 * n + 1) * k / (2 * length))
    c[0] *= np.sqrt(1.0 / length)
    if length > 1:
        c[1:] *= np.sqrt(2.0 / length)
    out = np.ascontiguousarray(c)
    out.setflags(write=False)
    return out


def dct2(x: np.ndarray) -> np.ndarray:
    """Orthonormal type-II DCT of a length-L sequence (first axis is time)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 1:
        raise ShapeMismatch("dct2 needs at least one sample")
    return np.tensordot(dct_basis(x.shape[0]), x, axes=(1, 0))


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Exact inverse of dct2 (the basis is orthonormal, so its transpose)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[0] < 1:
        raise ShapeMismatch("idct2 needs at least one coefficient")
    return np.tensordot(dct_basis(coeffs.shape[0]).T, coeffs, axes=(1, 0))


def pool_frames(frames: np.ndarray, pool_grid: tuple[int, int]) -> np.ndarray:
    """Mean-pool (..., H, W, d) onto (..., P_h, P_w, d) over non-overlapping patches."""
    frames = np.asarray(frames, dtype=np.float64)
    ph, pw = pool_grid
    h, w = frames.shape[-3], frames.shape[-2]
    if ph < 1 or pw < 1 or h % ph or w % pw:
        raise ShapeMismatch(f"grid {h}x{w} does not pool onto {ph}x{pw}")
    lead = frames.shape[:-3]
    d = frames.shape[-1]
    r = frames.reshape(*lead, ph, h // ph, pw, w // pw, d)
    return r.mean(axis=(-4, -2))


@dataclass(frozen=True)
class FrequencyBlock:
    """Retained DCT coefficients of one group: (K, P, d) plus per-position energy."""

    coeffs: np.ndarray  # (K, P, d) float32, coefficient k=0 is DC
    gop: int
    pool_grid: tuple[int, int]
    position_energy: np.ndarray  # (P,) float64, sum over coeffs and dims
    trajectory_length: int  # P-frame count before padding

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_positions(self) -> int:
        return self.coeffs.shape[1]

    @classmethod
    def empty(cls, gop_index: int, pool_grid: tuple[int, int], dim: int) -> "FrequencyBlock":
        p = pool_grid[0] * pool_grid[1]
        return cls(
            coeffs=np.zeros((0, p, dim), dtype=np.float32),
            gop=gop_index,
            pool_grid=pool_grid,
            position_energy=np.zeros(p, dtype=np.float64),
            trajectory_length=0,
        )


def pooled_residuals(gop: Gop, seq: LatentSequence, pool_grid: tuple[int, int]) -> np.ndarray:
    """(L, P, d) pooled residual trajectories of one group against its anchor."""
    if len(gop.p_frames) == 0:
        raise EmptyGop(f"group {gop.index} (anchor {gop.anchor}) has no P-frames")
    frames = np.asarray(seq.frames, dtype=np.float64)
    residual = frames[list(gop.p_frames)] - frames[gop.anchor]
    pooled = pool_frames(residual, pool_grid)
    l = pooled.shape[0]
    return pooled.reshape(l, pool_grid[0] * pool_grid[1], seq.dim)


def compress_gop(
    gop: Gop,
    seq: LatentSequence,
    pool_grid: tuple[int, int] = DEFAULT_POOL_GRID,
    k: int = 3,
) -> FrequencyBlock:
    """Pool, zero-pad along time to max(L, k), transform, keep k coefficients.

    Zero-padding lets a short group still carry k coefficients; the padded
    transform is deterministic and linear in the residuals.
    """
    if k < 1:
        raise ShapeMismatch(f"coefficient count must be >= 1, got {k}")
    pooled = pooled_residuals(gop, seq, pool_grid)  # raises EmptyGop
    l = pooled.shape[0]
    padded_len = max(l, k)
    if padded_len > l:
        pad = np.zeros((padded_len - l,) + pooled.shape[1:], dtype=pooled.dtype)
        pooled = np.concatenate([pooled, pad], axis=0)
    coeffs = dct2(pooled)[:k].astype(np.float32)
    energy = (coeffs.astype(np.float64) ** 2).sum(axis=(0, 2))
    return FrequencyBlock(
        coeffs=coeffs,
        gop=gop.index,
        pool_grid=pool_grid,
        position_energy=energy,
        trajectory_length=l,
    )


def energy_filter(
    blocks: list[FrequencyBlock], eps_rel: float = DEFAULT_EPS_REL
) -> tuple[list[tuple[int, int, int]], float]:
    """Drop pooled positions whose retained energy is near zero.

    A position survives when its energy is nonzero and at least
    eps_rel * mean(energy over all candidate positions). Survivors are
    returned as (gop, position, coeff) triples, one per retained
    coefficient token, in (gop, position, coeff) order. Zero-energy
    positions are dropped regardless of eps_rel.
    """
    if eps_rel < 0:
        raise ShapeMismatch(f"eps_rel must be >= 0, got {eps_rel}")
    energies = [b.position_energy for b in blocks if b.k > 0]
    if not energies:
        return [], 0.0
    all_e = np.concatenate(energies)
    threshold = eps_rel * float(all_e.mean())
    survivors = []
    for b in blocks:
        if b.k == 0:
            continue
        for p in range(b.n_positions):
            e = float(b.position_energy[p])
            if e == 0.0 or e < threshold:
                continue
            for c in range(b.k):
                survivors.append((b.gop, p, c))
    return survivors, threshold


def summary_vectors(blocks: list[FrequencyBlock], dim: int) -> list[np.ndarray]:
    """One d-vector per group: mean of retained coefficients over (coeff, position).

    Groups with no residual trajectory summarize to zero.
    """
    out = []
    for b in blocks:
        if b.coeffs.size == 0:
            out.append(np.zeros(dim, dtype=np.float32))
        else:
            out.append(b.coeffs.astype(np.float64).mean(axis=(0, 1)).astype(np.float32))
    return out


def static_token_cells(
    seq: LatentSequence,
    gops: list[Gop],
    cap: int,
    static_grid: tuple[int, int],
) -> list[tuple[int, int, np.ndarray]]:
    """Quietest static-grid cells, each carrying the pooled first-anchor embedding.

    Cells are ranked by total residual energy over all groups, ascending,
    ties broken in row-major order; at most ``cap`` cells are returned.
    The source embedding is the first anchor's pooled latent at the cell
    (statics represent unchanged background content, not residuals).
    """
    if cap <= 0:
        return []
    sh, sw = static_grid
    energy = np.zeros(sh * sw, dtype=np.float64)
    for gop in gops:
        if len(gop.p_frames) == 0:
            continue
        pooled = pooled_residuals(gop, seq, static_grid)
        energy += (pooled ** 2).sum(axis=(0, 2))
    first_anchor = min(g.anchor for g in gops) if gops else 0
    anchor_pooled = pool_frames(seq.frames[first_anchor], static_grid).reshape(sh * sw, seq.dim)
    order = np.argsort(energy, kind="stable")[:cap]
    out = []
    for flat in order:
        r, c = divmod(int(flat), sw)
        out.append((r, c, anchor_pooled[flat].astype(np.float32)))
    return out
