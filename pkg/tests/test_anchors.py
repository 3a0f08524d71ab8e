import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freres import InvalidBudget, LatentSequence, ShapeMismatch, block_prune, retain_top_energy, select_anchors
from freres.anchors import DEFAULT_TAU, cosine_distance, token_energies
from conftest import random_sequence


def constant_sequence(value_vec, frames=16, grid=(6, 6)):
    h, w = grid
    d = len(value_vec)
    arr = np.tile(np.asarray(value_vec, dtype=np.float32), (frames, h, w, 1))
    return LatentSequence(frames=arr)


def test_identical_frames_give_uniform_anchors():
    seq = constant_sequence([1.0, 0.0], frames=16)
    anchors = select_anchors(seq, 8, tau=0.3)
    assert anchors.indices == (0, 2, 4, 6, 8, 10, 12, 14)
    assert anchors.uniform_count == 8
    assert anchors.event_count == 0


def test_orthogonal_jump_promotes_event_anchor():
    # Frames 0..4 point along e0, frames 5..15 along e1: the mean-pooled
    # frame vectors are orthogonal at the jump, cosine distance 1 > 0.3.
    arr = np.zeros((16, 6, 6, 2), dtype=np.float32)
    arr[:5, :, :, 0] = 1.0
    arr[5:, :, :, 1] = 1.0
    anchors = select_anchors(LatentSequence(frames=arr), 8, tau=0.3)
    assert anchors.indices == tuple(sorted({0, 2, 4, 6, 8, 10, 12, 14} | {5}))
    assert anchors.event_count == 1


def test_default_tau_value():
    assert DEFAULT_TAU == 0.3


def test_tau_two_equals_uniform_set(rng):
    seq = random_sequence(rng, frames=13, grid=(6, 6), dim=4)
    strict = select_anchors(seq, 5, tau=2.0)
    assert strict.indices == tuple((i * 13) // 5 for i in range(5))
    assert strict.event_count == 0


def test_anchor_selection_scale_invariant(rng):
    seq = random_sequence(rng, frames=12, grid=(6, 6), dim=4)
    scaled = LatentSequence(frames=seq.frames * np.float32(37.5))
    a = select_anchors(seq, 4, tau=0.25)
    b = select_anchors(scaled, 4, tau=0.25)
    assert a.indices == b.indices


@pytest.mark.parametrize("m", [0, -1, 17])
def test_invalid_anchor_budget(rng, m):
    seq = random_sequence(rng, frames=16, grid=(6, 6), dim=4)
    with pytest.raises(InvalidBudget):
        select_anchors(seq, m)


def test_zero_vector_distance_rule():
    z = np.zeros(3)
    v = np.array([1.0, 0.0, 0.0])
    assert cosine_distance(z, v) == 1.0
    assert cosine_distance(v, z) == 1.0
    assert cosine_distance(z, z) == 1.0


def test_frame_zero_always_anchor(rng):
    for m in (1, 3, 7):
        seq = random_sequence(rng, frames=11, grid=(6, 6), dim=4)
        assert select_anchors(seq, m, tau=2.0).indices[0] == 0


# -- block pruning ---------------------------------------------------------


def brute_force_drops(frame):
    """Exhaustive scan: per 3x3 block, the first minimal-energy token."""
    energy = (np.asarray(frame, dtype=np.float64) ** 2).sum(axis=-1)
    h, w = energy.shape
    drops = set()
    for br in range(h // 3):
        for bc in range(w // 3):
            best = None
            for i in range(3):
                for j in range(3):
                    r, c = br * 3 + i, bc * 3 + j
                    if best is None or energy[r, c] < energy[best]:
                        best = (r, c)
            drops.add(best)
    return drops


def test_block_prune_keeps_512_of_576(rng):
    frame = rng.normal(size=(24, 24, 8))
    pruned = block_prune(frame)
    assert len(pruned.kept) == 512
    assert pruned.dropped_mask.sum() == 64


def test_block_prune_matches_exhaustive_scan(rng):
    for _ in range(10):
        frame = rng.normal(size=(12, 12, 4))
        pruned = block_prune(frame)
        got = {(r, c) for r in range(12) for c in range(12) if pruned.dropped_mask[r, c]}
        assert got == brute_force_drops(frame)


def test_block_prune_tie_breaks_row_major():
    frame = np.ones((6, 6, 2), dtype=np.float32)
    pruned = block_prune(frame)
    drops = {(r, c) for r in range(6) for c in range(6) if pruned.dropped_mask[r, c]}
    assert drops == {(0, 0), (0, 3), (3, 0), (3, 3)}


def test_block_prune_flat_index_energies():
    # Energy equal to the flat grid index: the block minimum is always the
    # block's top-left token.
    h = w = 6
    vals = np.sqrt(np.arange(h * w, dtype=np.float64)).reshape(h, w, 1)
    pruned = block_prune(vals)
    got = {(r, c) for r in range(h) for c in range(w) if pruned.dropped_mask[r, c]}
    assert got == brute_force_drops(vals)
    assert got == {(0, 0), (0, 3), (3, 0), (3, 3)}


def test_block_prune_rejects_indivisible_grid(rng):
    with pytest.raises(ShapeMismatch):
        block_prune(rng.normal(size=(10, 12, 2)))


def test_dropped_energy_is_block_minimum(rng):
    frame = rng.normal(size=(9, 9, 3))
    pruned = block_prune(frame)
    energy = token_energies(frame)
    for br in range(3):
        for bc in range(3):
            block = energy[br * 3:br * 3 + 3, bc * 3:bc * 3 + 3]
            dmask = pruned.dropped_mask[br * 3:br * 3 + 3, bc * 3:bc * 3 + 3]
            assert dmask.sum() == 1
            assert block[dmask][0] == block.min()


def test_retain_top_energy(rng):
    frame = rng.normal(size=(6, 6, 2))
    pruned = block_prune(frame)
    kept = retain_top_energy(pruned, 10)
    assert len(kept.kept) == 10
    kept_e = [float((e.astype(np.float64) ** 2).sum()) for _, e in kept.kept]
    all_e = sorted(
        (float((e.astype(np.float64) ** 2).sum()) for _, e in pruned.kept), reverse=True
    )
    assert sorted(kept_e, reverse=True) == pytest.approx(all_e[:10])
    coords = [(c.row, c.col) for c, _ in kept.kept]
    assert coords == sorted(coords)


def test_retain_top_energy_noop_when_budget_covers(rng):
    frame = rng.normal(size=(6, 6, 2))
    pruned = block_prune(frame)
    assert retain_top_energy(pruned, 32) is pruned


@settings(max_examples=25, deadline=None)
@given(h=st.sampled_from([3, 6, 9]), w=st.sampled_from([3, 6, 9]), seed=st.integers(0, 10_000))
def test_block_prune_keeps_eight_ninths(h, w, seed):
    frame = np.random.default_rng(seed).normal(size=(h, w, 2))
    pruned = block_prune(frame)
    assert len(pruned.kept) == h * w * 8 // 9
