import math

import numpy as np
import pytest

from freres import (
    AnchorSet,
    EmptyGop,
    LatentSequence,
    ShapeMismatch,
    compress_gop,
    dct2,
    energy_filter,
    group_frames,
    idct2,
    pool_frames,
    select_anchors,
    static_token_cells,
    summary_vectors,
)
from freres.temporal import FrequencyBlock, Gop
from conftest import random_sequence


def oracle_dct2(x):
    """Brute-force evaluation of the orthonormal DCT-II definition."""
    L = len(x)
    out = []
    for k in range(L):
        s = math.sqrt(1.0 / L) if k == 0 else math.sqrt(2.0 / L)
        out.append(s * sum(x[n] * math.cos(math.pi * (2 * n + 1) * k / (2 * L)) for n in range(L)))
    return np.array(out)


def anchors_at(indices, tau=2.0):
    return AnchorSet(indices=tuple(indices), uniform_count=len(indices), event_count=0, tau=tau)


# -- grouping ---------------------------------------------------------------


def test_uniform_16_frames_8_groups():
    gops = group_frames(anchors_at(range(0, 16, 2)), 16)
    assert len(gops) == 8
    for g, gop in enumerate(gops):
        assert gop.anchor == 2 * g
        assert gop.p_frames == (2 * g + 1,)
        assert gop.index == g


def test_single_anchor_grouping():
    gops = group_frames(anchors_at([0]), 4)
    assert len(gops) == 1
    assert gops[0].p_frames == (1, 2, 3)


def test_all_frames_anchors_gives_empty_groups():
    gops = group_frames(anchors_at(range(5)), 5)
    assert len(gops) == 5
    assert all(len(g) == 0 for g in gops)


def test_every_nonanchor_frame_in_exactly_one_group():
    anchors = anchors_at([0, 3, 9])
    gops = group_frames(anchors, 12)
    seen = [f for g in gops for f in g.p_frames]
    assert sorted(seen) == [f for f in range(12) if f not in (0, 3, 9)]
    assert len(seen) == len(set(seen))


# -- DCT --------------------------------------------------------------------


def test_constant_sequence_is_dc_only():
    c = 2.5
    for L in (1, 4, 9):
        coeffs = dct2(np.full(L, c))
        assert coeffs[0] == pytest.approx(c * math.sqrt(L), rel=1e-12)
        assert np.abs(coeffs[1:]).max() < 1e-12 if L > 1 else True


def test_dct_matches_bruteforce_definition():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(dct2(x), oracle_dct2(x), rtol=1e-12, atol=1e-12)


def test_dct_matches_bruteforce_random(rng):
    for L in (1, 2, 5, 13):
        x = rng.normal(size=L)
        np.testing.assert_allclose(dct2(x), oracle_dct2(x), rtol=1e-10, atol=1e-10)


def test_parseval(rng):
    for L in range(1, 33):
        x = rng.normal(size=L)
        lhs = (dct2(x) ** 2).sum()
        rhs = (x ** 2).sum()
        assert abs(lhs - rhs) <= 1e-6 * rhs


def test_round_trip(rng):
    for L in range(1, 33):
        x = rng.normal(size=L)
        back = idct2(dct2(x))
        np.testing.assert_allclose(back, x, rtol=1e-6, atol=1e-9)


def test_linearity(rng):
    x, y = rng.normal(size=12), rng.normal(size=12)
    a, b = 2.25, -0.75
    np.testing.assert_allclose(dct2(a * x + b * y), a * dct2(x) + b * dct2(y), rtol=1e-9, atol=1e-12)


def test_pure_dc_inverts_to_constant():
    L = 9
    coeffs = np.zeros(L)
    coeffs[0] = math.sqrt(L)
    np.testing.assert_allclose(idct2(coeffs), np.ones(L), rtol=1e-12)


def test_truncation_is_a_projection(rng):
    x = rng.normal(size=16)
    full = dct2(x)
    trunc = full.copy()
    trunc[5:] = 0.0
    recon = idct2(trunc)
    assert (recon ** 2).sum() <= (x ** 2).sum() + 1e-12


def test_bandlimited_top5_energy_is_total(rng):
    # Exact combination of the first five basis vectors.
    L = 16
    coeffs = np.zeros(L)
    coeffs[:5] = rng.normal(size=5)
    x = idct2(coeffs)
    spec = dct2(x) ** 2
    assert spec[:5].sum() == pytest.approx(spec.sum(), rel=1e-9)


# -- pooling and compression -------------------------------------------------


def test_pool_frames_patch_means(rng):
    frames = rng.normal(size=(2, 4, 6, 3))
    pooled = pool_frames(frames, (2, 3))
    assert pooled.shape == (2, 2, 3, 3)
    np.testing.assert_allclose(pooled[0, 0, 0], frames[0, :2, :2, :].mean(axis=(0, 1)))


def test_pool_rejects_indivisible(rng):
    with pytest.raises(ShapeMismatch):
        pool_frames(rng.normal(size=(2, 5, 6, 3)), (2, 3))


def test_identical_pframes_give_zero_coefficients(rng):
    base = rng.normal(size=(6, 6, 4)).astype(np.float32)
    seq = LatentSequence(frames=np.tile(base, (4, 1, 1, 1)))
    gops = group_frames(anchors_at([0]), 4)
    block = compress_gop(gops[0], seq, (2, 2), k=3)
    assert np.all(block.coeffs == 0.0)
    survivors, _ = energy_filter([block])
    assert survivors == []


def test_single_residual_zero_padded_to_k(rng):
    frames = rng.normal(size=(2, 6, 6, 4)).astype(np.float32)
    seq = LatentSequence(frames=frames)
    gop = Gop(anchor=0, p_frames=(1,), index=0)
    block = compress_gop(gop, seq, (2, 2), k=3)
    assert block.coeffs.shape == (3, 4, 4)
    pooled = pool_frames(seq.frames[1].astype(np.float64) - seq.frames[0], (2, 2)).reshape(4, 4)
    for p in range(4):
        for dim in range(4):
            expected = oracle_dct2([pooled[p, dim], 0.0, 0.0])
            np.testing.assert_allclose(block.coeffs[:, p, dim], expected, rtol=1e-5, atol=1e-6)


def test_compact_candidate_arithmetic(rng):
    seq = random_sequence(rng, frames=16, grid=(24, 24), dim=4)
    anchors = select_anchors(seq, 8, tau=2.0)
    gops = group_frames(anchors, 16)
    blocks = [compress_gop(g, seq, (4, 4), k=3) for g in gops]
    candidates = sum(b.k * b.n_positions for b in blocks)
    assert candidates == 8 * 3 * 16 == 384


def test_empty_gop_raises():
    seq = LatentSequence(frames=np.zeros((2, 6, 6, 2), dtype=np.float32))
    with pytest.raises(EmptyGop):
        compress_gop(Gop(anchor=0, p_frames=(), index=0), seq, (2, 2), k=1)


# -- energy filter ------------------------------------------------------------


def _block_with_energy(gop, energies, k=2, dim=3):
    p = len(energies)
    coeffs = np.zeros((k, p, dim), dtype=np.float32)
    for i, e in enumerate(energies):
        coeffs[0, i, 0] = np.sqrt(e)
    return FrequencyBlock(
        coeffs=coeffs, gop=gop, pool_grid=(1, p),
        position_energy=np.array(energies, dtype=np.float64), trajectory_length=k,
    )


def test_zero_energy_positions_always_dropped():
    block = _block_with_energy(0, [0.0, 0.0, 0.0])
    survivors, _ = energy_filter([block], eps_rel=0.0)
    assert survivors == []


def test_eps_zero_keeps_all_positive():
    block = _block_with_energy(0, [0.5, 1.0, 2.0])
    survivors, _ = energy_filter([block], eps_rel=0.0)
    assert len(survivors) == 3 * block.k


def test_filter_drops_below_relative_threshold():
    block = _block_with_energy(0, [0.001, 1.0, 1.0, 1.0])
    survivors, threshold = energy_filter([block], eps_rel=0.1)
    positions = {p for _, p, _ in survivors}
    assert positions == {1, 2, 3}
    assert threshold == pytest.approx(0.1 * (3.001 / 4))


def test_survivors_subset_of_candidates_and_above_threshold(rng):
    blocks = [_block_with_energy(g, rng.uniform(0, 1, size=8).tolist()) for g in range(4)]
    survivors, threshold = energy_filter(blocks, eps_rel=0.3)
    assert len(survivors) <= sum(b.k * b.n_positions for b in blocks)
    for g, p, c in survivors:
        assert blocks[g].position_energy[p] >= threshold
        assert 0 <= c < blocks[g].k


# -- summaries and statics ----------------------------------------------------


def test_one_summary_per_group(rng):
    seq = random_sequence(rng, frames=16, grid=(24, 24), dim=4)
    gops = group_frames(select_anchors(seq, 8, tau=2.0), 16)
    blocks = [compress_gop(g, seq, (4, 4), k=3) for g in gops]
    vecs = summary_vectors(blocks, 4)
    assert len(vecs) == 8


def test_summary_of_zero_coefficients_is_zero():
    block = _block_with_energy(0, [0.0, 0.0])
    vec = summary_vectors([block], 3)[0]
    assert np.all(vec == 0.0)


def test_summary_single_position_single_coeff_identity(rng):
    coeffs = rng.normal(size=(1, 1, 5)).astype(np.float32)
    block = FrequencyBlock(coeffs=coeffs, gop=0, pool_grid=(1, 1),
                           position_energy=np.array([1.0]), trajectory_length=1)
    np.testing.assert_array_equal(summary_vectors([block], 5)[0], coeffs[0, 0])


def test_empty_group_summary_is_zero(rng):
    block = FrequencyBlock.empty(0, (2, 2), 4)
    assert np.all(summary_vectors([block], 4)[0] == 0.0)


def test_static_cap_zero_empty(rng):
    seq = random_sequence(rng, frames=4, grid=(6, 6), dim=2)
    gops = group_frames(anchors_at([0]), 4)
    assert static_token_cells(seq, gops, 0, (2, 2)) == []


def test_fully_static_ties_emit_row_major(rng):
    base = rng.normal(size=(8, 8, 2)).astype(np.float32)
    seq = LatentSequence(frames=np.tile(base, (4, 1, 1, 1)))
    gops = group_frames(anchors_at([0]), 4)
    cells = static_token_cells(seq, gops, 24, (4, 4))
    assert [(r, c) for r, c, _ in cells] == [(r, c) for r in range(4) for c in range(4)]
    pooled = pool_frames(base, (4, 4))
    for r, c, emb in cells:
        np.testing.assert_allclose(emb, pooled[r, c], rtol=1e-6)


def test_static_ranking_prefers_quiet_cells(rng):
    base = np.zeros((4, 6, 6, 2), dtype=np.float32)
    base[1:, :3, :3, :] = 5.0  # loud top-left quadrant on P-frames
    seq = LatentSequence(frames=base)
    gops = group_frames(anchors_at([0]), 4)
    cells = static_token_cells(seq, gops, 2, (2, 2))
    picked = {(r, c) for r, c, _ in cells}
    assert (0, 0) not in picked
