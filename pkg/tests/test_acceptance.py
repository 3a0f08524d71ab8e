"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Every tolerance is pinned here; nothing defers to later calibration.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from freres import (
    BudgetRequest,
    BudgetTooSmall,
    EncodeOptions,
    FusionConfig,
    FusionMode,
    LatentSequence,
    TokenKind,
    account_context,
    allocate,
    absorb,
    attention_matrix,
    build_mask,
    compression_ratio,
    dct2,
    energy_spectrum,
    gen_synthetic,
    idct2,
    run_pipeline,
    seeded_weights,
    select_anchors,
    SyntheticSpec,
)
from freres.absorber import AbsorberWeights, NeighborhoodMask
from freres.anchors import block_prune
from freres.model import validate
from freres.temporal import dct_basis


def criterion(name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


# -- 1. context-token accounting, exact --------------------------------------


def test_table_accounting_exact():
    start = time.monotonic()
    ok = (
        account_context(1800, 576, 22) == 1_036_822
        and account_context(60, 576, 22) == 34_582
        and account_context(1800, 72, 22) == 129_622
    )
    elapsed = time.monotonic() - start
    criterion("context accounting exact", ok and elapsed < 1.0, f"{elapsed:.3f}s")


# -- 2. compact-instantiation arithmetic --------------------------------------


def _forced_survivor_sequence():
    """16 frames, 24x24x8; exactly 95 of 128 pooled cells carry residual energy.

    Anchors sit at even frames (tau=2 suppresses promotions), so each odd
    frame is the lone P-frame of its group. A unit bump on a pooled cell's
    whole patch makes that (group, cell) energy exactly one; untouched
    cells have exactly zero residual and are always filtered.
    """
    rng = np.random.default_rng(99)
    base = rng.normal(size=(24, 24, 8)).astype(np.float32)
    frames = np.repeat(base[None], 16, axis=0)
    active_per_gop = [12] * 7 + [11]  # 95 total
    for g, count in enumerate(active_per_gop):
        p_frame = 2 * g + 1
        cells = [(g * 3 + i) % 16 for i in range(count)]
        for cell in set(cells):
            r, c = divmod(cell, 4)
            frames[p_frame, r * 6:(r + 1) * 6, c * 6:(c + 1) * 6, 0] += 1.0
        assert len(set(cells)) == count
    return LatentSequence(frames=frames)


def test_compact_instantiation_arithmetic():
    seq = _forced_survivor_sequence()
    opts = EncodeOptions(
        budget=4512, anchors=8, k_raw=512, k_max=3, tau=2.0,
        static_budget=24, static_grid=(6, 6),
    )
    stream, report = run_pipeline(seq, opts, FusionConfig(mode=FusionMode.ABSORBER),
                                  seeded_weights(0, 8))
    candidates_ok = report.candidates == 384
    summaries = stream.count(TokenKind.SUMMARY)
    statics = stream.count(TokenKind.STATIC)
    anchors = stream.count(TokenKind.RAW_ANCHOR)
    survivors = stream.count(TokenKind.DYNAMIC_P)
    total = stream.budget_used
    ratio = compression_ratio(9216, total)
    ok = (
        candidates_ok
        and summaries == 8
        and statics <= 24
        and anchors == 4096
        and 283 <= survivors <= 287
        and abs(total - 4413) <= 4
        and abs(ratio - 2.09) <= 0.01
    )
    criterion(
        "compact instantiation arithmetic",
        ok,
        f"candidates={report.candidates} survivors={survivors} statics={statics} "
        f"total={total} ratio={ratio:.4f}",
    )


# -- 3. block pruning ----------------------------------------------------------


def test_block_pruning_exhaustive():
    rng = np.random.default_rng(5)
    ok = True
    for _ in range(100):
        frame = rng.normal(size=(24, 24, 6))
        pruned = block_prune(frame)
        if len(pruned.kept) != 512 or pruned.dropped_mask.sum() != 64:
            ok = False
            break
        energy = (frame.astype(np.float64) ** 2).sum(axis=-1)
        for br in range(8):
            for bc in range(8):
                block = energy[br * 3:br * 3 + 3, bc * 3:bc * 3 + 3]
                mask = pruned.dropped_mask[br * 3:br * 3 + 3, bc * 3:bc * 3 + 3]
                flat_drop = int(np.flatnonzero(mask.ravel())[0]) if mask.sum() == 1 else -1
                if mask.sum() != 1 or flat_drop != int(block.ravel().argmin()):
                    ok = False
        if not ok:
            break
    criterion("block pruning 512/576 with block-minimal drops", ok)


# -- 4. DCT suite ---------------------------------------------------------------


def test_dct_suite():
    start = time.monotonic()
    rng = np.random.default_rng(11)
    ok = True
    for length in range(1, 33):
        basis = dct_basis(length)
        x = rng.normal(size=(1000, length))
        coeffs = x @ basis.T
        back = coeffs @ basis
        num = np.abs(back - x).max(axis=1)
        den = np.abs(x).max(axis=1)
        if (num > 1e-6 * den).any():
            ok = False
        lhs = (coeffs ** 2).sum(axis=1)
        rhs = (x ** 2).sum(axis=1)
        if (np.abs(lhs - rhs) > 1e-6 * rhs).any():
            ok = False
        const = dct2(np.full(length, 3.25))
        if abs(const[0] - 3.25 * math.sqrt(length)) > 1e-9 or (
            length > 1 and np.abs(const[1:]).max() > 1e-9
        ):
            ok = False
    elapsed = time.monotonic() - start
    criterion("DCT round-trip + Parseval + DC-only", ok and elapsed < 5.0, f"{elapsed:.2f}s")


# -- 5. noise baseline -----------------------------------------------------------


def test_noise_baseline():
    rng = np.random.default_rng(123)
    x = rng.normal(size=(1000, 16))
    coeffs = x @ dct_basis(16).T
    energy = coeffs ** 2
    ratios = energy[:, :5].sum(axis=1) / energy.sum(axis=1)
    mean = float(ratios.mean())
    ok = abs(mean - 0.3125) <= 0.03
    criterion("white-noise top-5 baseline", ok, f"mean={mean:.4f}")


# -- 6. energy-compaction ordering ------------------------------------------------


def test_energy_compaction_ordering():
    kinds = ["static", "slow", "fast", "scenecut", "noise"]
    means = {}
    for kind in kinds:
        vals = []
        for seed in range(200):
            seq = gen_synthetic(SyntheticSpec(kind=kind, frames=16, grid=(24, 24),
                                              dim=8, seed=40_000 + seed))
            anchors = select_anchors(seq, 1, tau=2.0)
            report = energy_spectrum(seq, anchors, (4, 4))
            vals.append(report.topk_ratio(5))
        means[kind] = float(np.mean(vals))
    ok = (
        means["static"] > means["slow"] > means["fast"]
        > means["scenecut"] > means["noise"]
    )
    criterion(
        "energy-compaction ordering static>slow>fast>scenecut>noise",
        ok,
        " ".join(f"{k}={means[k]:.4f}" for k in kinds),
    )


# -- 7. budget formula ------------------------------------------------------------


def test_budget_formula_sweep():
    rng = np.random.default_rng(77)
    checked = 0
    ok = True
    while checked < 500:
        req_kwargs = dict(
            budget=int(rng.integers(1, 60_000)),
            anchors=int(rng.integers(0, 17)),
            k_raw=int(rng.integers(0, 600)),
            summary_budget=int(rng.integers(0, 33)),
            static_budget=int(rng.integers(0, 33)),
            groups=int(rng.integers(1, 17)),
            pool_positions=int(rng.choice([4, 16, 36])),
            k_max=int(rng.integers(1, 9)),
            group_length=int(rng.integers(1, 21)),
        )
        req = BudgetRequest(**req_kwargs)
        freq = req.budget - req.anchors * req.k_raw - req.summary_budget - req.static_budget
        expected = min(req.k_max, req.group_length,
                       freq // (req.groups * req.pool_positions)) if freq > 0 else 0
        if freq <= 0 or expected < 1:
            try:
                allocate(req)
                ok = False
            except BudgetTooSmall:
                pass
            checked += 1
            continue
        plan = allocate(req)
        if plan.k != expected or plan.predicted_max_tokens > req.budget:
            ok = False
        bigger = allocate(BudgetRequest(**{**req_kwargs, "budget": req.budget + 5000}))
        if bigger.k < plan.k:
            ok = False
        checked += 1
    criterion("budget formula vs oracle, 500 cases + monotonicity", ok)


# -- 8. absorber suite --------------------------------------------------------------


def test_absorber_suite():
    rng = np.random.default_rng(13)
    ok = True
    d = 6
    w = AbsorberWeights(
        w_q=rng.normal(size=(d, d)), w_k=rng.normal(size=(d, d)), w_v=rng.normal(size=(d, d)),
        ln_scale=np.ones(d), ln_shift=np.zeros(d),
    )
    anchors = rng.normal(size=(12, d))
    ps = rng.normal(size=(9, d))
    allowed = rng.random((12, 9)) < 0.4
    weights = attention_matrix(anchors, ps, w, NeighborhoodMask(allowed=allowed, radius=1))
    for i in range(12):
        s = weights[i].sum()
        if allowed[i].any() and abs(s - 1.0) > 1e-6:
            ok = False
        if not allowed[i].any() and s != 0.0:
            ok = False
    if np.any(weights[~allowed] != 0.0):
        ok = False

    coords_a = rng.integers(0, 24, size=(30, 2))
    coords_p = rng.integers(0, 24, size=(14, 2))
    prev = build_mask(coords_a, coords_p, 0.0).allowed
    for r in (1.0, 3.0, 7.5, 24.0):
        cur = build_mask(coords_a, coords_p, r).allowed
        if not (prev <= cur).all():
            ok = False
        prev = cur

    eye = np.eye(d)
    w_id = AbsorberWeights(w_q=eye, w_k=eye, w_v=eye,
                           ln_scale=np.ones(d), ln_shift=np.zeros(d))
    single = np.zeros((3, 9), dtype=bool)
    single[0, 4], single[1, 2], single[2, 8] = True, True, True
    from freres import masked_cross_attention
    mixed = masked_cross_attention(anchors[:3], ps, w_id, NeighborhoodMask(allowed=single, radius=0))
    if not (np.array_equal(mixed[0], ps[4]) and np.array_equal(mixed[1], ps[2])
            and np.array_equal(mixed[2], ps[8])):
        ok = False

    # 2x3x2 hand oracle, scalar arithmetic only.
    a2 = np.array([[1.0, 0.0], [0.0, 2.0]])
    p2 = np.array([[1.0, 1.0], [2.0, 0.0], [0.0, -1.0]])
    w2 = AbsorberWeights(w_q=np.eye(2), w_k=np.eye(2), w_v=np.eye(2),
                         ln_scale=np.ones(2), ln_shift=np.zeros(2), ln_eps=1e-5)
    got = absorb(a2, p2, w2, NeighborhoodMask(allowed=np.ones((2, 3), bool), radius=99))
    expected = []
    for qi in range(2):
        logits = [
            (a2[qi, 0] * p2[j, 0] + a2[qi, 1] * p2[j, 1]) / math.sqrt(2.0) for j in range(3)
        ]
        mx = max(logits)
        exps = [math.exp(l - mx) for l in logits]
        z = sum(exps)
        mixed_row = [sum(exps[j] / z * p2[j, dim] for j in range(3)) for dim in range(2)]
        pre = [a2[qi, dim] + mixed_row[dim] for dim in range(2)]
        mu = sum(pre) / 2.0
        var = sum((x - mu) ** 2 for x in pre) / 2.0
        expected.append([(x - mu) / math.sqrt(var + 1e-5) for x in pre])
    if np.abs(got - np.array(expected)).max() > 1e-5:
        ok = False

    criterion("absorber suite (stochastic rows, monotone mask, single-key, hand oracle)", ok)


# -- 9. ablation modes --------------------------------------------------------------


def test_ablation_mode_counts(tmp_path):
    clip = tmp_path / "clip.frl"
    gen = subprocess.run(
        [sys.executable, "-m", "freres", "gen", "--kind", "fast", "--frames", "16",
         "--grid", "24x24", "--dim", "8", "--seed", "21", "-o", str(clip)],
        capture_output=True, text=True,
    )
    ok = gen.returncode == 0
    counts = {}
    reports = {}
    for mode in ("spatial-only", "temporal-only", "concat", "absorber"):
        out = tmp_path / f"{mode}.tokens"
        budget = "4096" if mode == "spatial-only" else "4512"
        r = subprocess.run(
            [sys.executable, "-m", "freres", "encode", str(clip), "--budget", budget,
             "--anchors", "8", "--kraw", "512", "--kmax", "3", "--tau", "2.0",
             "--mode", mode, "--seed", "0", "-o", str(out)],
            capture_output=True, text=True,
        )
        ok = ok and r.returncode == 0
        kv = dict(line.split("=", 1) for line in r.stdout.splitlines() if "=" in line)
        counts[mode] = int(kv.get("total_tokens", -1))
        reports[mode] = kv
    ok = ok and counts["spatial-only"] == 8 * 512
    surv = int(reports["temporal-only"].get("survivors", -1))
    summaries = int(reports["temporal-only"].get("count_summary", -1))
    statics = int(reports["temporal-only"].get("count_static", -1))
    ok = ok and counts["temporal-only"] == surv + summaries + statics
    ok = ok and counts["concat"] == counts["spatial-only"] + counts["temporal-only"]
    ok = ok and counts["absorber"] == counts["concat"]
    criterion(
        "ablation modes A/B/C/F constructible via flags",
        ok,
        " ".join(f"{m}={counts[m]}" for m in counts),
    )


# -- 10. determinism -----------------------------------------------------------------


def test_encode_determinism(tmp_path):
    clip = tmp_path / "clip.frl"
    subprocess.run(
        [sys.executable, "-m", "freres", "gen", "--kind", "scenecut", "--frames", "16",
         "--grid", "24x24", "--dim", "8", "--seed", "33", "-o", str(clip)],
        check=True,
    )
    blobs = []
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.tokens"
        rep = tmp_path / f"{tag}.report"
        r = subprocess.run(
            [sys.executable, "-m", "freres", "encode", str(clip), "--budget", "4512",
             "--anchors", "8", "--kraw", "512", "--kmax", "3", "--mode", "absorber",
             "--seed", "5", "-o", str(out), "--report", str(rep)],
            capture_output=True, text=True,
        )
        outs.append(r.returncode)
        blobs.append(out.read_bytes() + rep.read_bytes())
    ok = outs == [0, 0] and blobs[0] == blobs[1]
    criterion("byte-identical exports across runs", ok)


# -- 11. candidate-count scaling ------------------------------------------------------


def test_candidate_count_scaling(rng):
    base = np.random.default_rng(3).normal(size=(16, 24, 24, 8)).astype(np.float32)
    seq = LatentSequence(frames=base)
    validate(seq)
    got = {}
    for k_max, expected in ((1, 128), (3, 384), (5, 640)):
        budget = 4096 + 8 + 24 + 8 * k_max * 16
        opts = EncodeOptions(budget=budget, anchors=8, k_raw=512, k_max=k_max, tau=2.0)
        _, report = run_pipeline(seq, opts, FusionConfig(mode=FusionMode.CONCAT),
                                 seeded_weights(0, 8))
        got[k_max] = report.candidates
    ok = got == {1: 128, 3: 384, 5: 640}
    criterion("candidate scaling 8xKx16 for K=1,3,5", ok, str(got))
