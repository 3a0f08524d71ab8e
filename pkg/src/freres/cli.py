"""Command-line interface.

Subcommands: ``gen`` (synthetic latents), ``encode`` (full pipeline),
``plan`` (budget resolution), ``analyze`` (residual spectra), ``account``
(context-token totals). Exit codes: 0 ok, 2 validation error, 3 budget
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import errors
from .anchors import select_anchors
from .budget import BudgetRequest, account_context, allocate
from .fusion import FusionConfig, FusionMode
from .io import load_weights, read_latents, seeded_weights, write_latents, write_tokens
from .pipeline import EncodeOptions, run_pipeline
from .spectrum import energy_spectrum, write_spectrum_csv
from .synthetic import SYNTHETIC_KINDS, SyntheticSpec, gen_synthetic

__all__ = ["main"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_IO = 4

_BUDGET_ERRORS = (errors.InvalidBudget, errors.BudgetTooSmall, errors.DivisionDomain)
_IO_ERRORS = (errors.IoFailure, OSError)


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError as e:
        raise errors.InvalidSpec(f"expected HxW, got {text!r}") from e


def _parse_pool(text: str) -> tuple[int, int]:
    """Accept '4x4' or a bare position count with an integer square root."""
    if "x" in text.lower():
        return _parse_grid(text)
    n = int(text)
    side = int(round(n ** 0.5))
    if side * side != n:
        raise errors.InvalidSpec(f"pool count {n} is not a square; pass HxW instead")
    return side, side


def _parse_pool_count(text: str) -> int:
    """Accept '4x4' or a bare position count; only the count matters."""
    if "x" in text.lower():
        h, w = _parse_grid(text)
        return h * w
    return int(text)


def _add_gen(sub):
    p = sub.add_parser("gen", help="generate a synthetic latent clip")
    p.add_argument("--kind", required=True, choices=SYNTHETIC_KINDS)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--grid", type=str, default="24x24")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--motion-rate", type=float, default=None)
    p.add_argument("--cut-at", type=int, default=None)
    p.add_argument("--jitter", type=float, default=None)
    p.add_argument("-o", "--output", required=True)


def _add_encode(sub):
    p = sub.add_parser("encode", help="run the full compression pipeline")
    p.add_argument("input")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--anchors", type=int, required=True)
    p.add_argument("--kraw", type=int, default=512)
    p.add_argument("--groups", type=int, default=None)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--tau", type=float, default=0.3)
    p.add_argument("--radius", type=float, default=6.0)
    p.add_argument("--mode", type=str, default="absorber",
                   choices=[m.value for m in FusionMode])
    p.add_argument("--pool", type=str, default="4x4")
    p.add_argument("--summary", type=int, default=None, help="summary-token budget")
    p.add_argument("--static-cap", type=int, default=24)
    p.add_argument("--static-grid", type=str, default=None)
    p.add_argument("--eps-rel", type=float, default=0.05)
    p.add_argument("--weights", type=str, default=None)
    p.add_argument("--seed", type=int, default=0, help="weight seed when no --weights file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", type=str, default=None)


def _add_plan(sub):
    p = sub.add_parser("plan", help="resolve a budget allocation")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--anchors", type=int, required=True)
    p.add_argument("--kraw", type=int, required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--pool", type=str, required=True, help="positions (16) or grid (4x4)")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--lgroup", type=int, required=True)
    p.add_argument("--summary", type=int, default=None)
    p.add_argument("--static", type=int, default=24)


def _add_analyze(sub):
    p = sub.add_parser("analyze", help="residual-trajectory energy spectrum")
    p.add_argument("input", nargs="?", default=None, help=".frl file")
    p.add_argument("--synthetic", type=str, default=None, choices=SYNTHETIC_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--grid", type=str, default="24x24")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--anchors", type=int, default=1)
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--pool", type=str, default="4x4")
    p.add_argument("-o", "--output", required=True)


def _add_account(sub):
    p = sub.add_parser("account", help="context-token accounting")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--per-frame", type=int, required=True)
    p.add_argument("--text", type=int, default=22)


def _cmd_gen(args) -> int:
    spec_kwargs = dict(
        kind=args.kind, frames=args.frames, grid=_parse_grid(args.grid),
        dim=args.dim, seed=args.seed, motion_rate=args.motion_rate, cut_at=args.cut_at,
    )
    if args.jitter is not None:
        spec_kwargs["jitter"] = args.jitter
    seq = gen_synthetic(SyntheticSpec(**spec_kwargs))
    write_latents(seq, args.output)
    return EXIT_OK


def _cmd_encode(args) -> int:
    seq = read_latents(args.input)
    if args.weights:
        weights = load_weights(args.weights, seq.dim)
    else:
        weights = seeded_weights(args.seed, seq.dim)
    opts = EncodeOptions(
        budget=args.budget,
        anchors=args.anchors,
        k_raw=args.kraw,
        k_max=args.kmax,
        groups=args.groups,
        pool_grid=_parse_pool(args.pool),
        summary_budget=args.summary,
        static_budget=args.static_cap,
        static_grid=_parse_grid(args.static_grid) if args.static_grid else None,
        tau=args.tau,
        radius=args.radius,
        eps_rel=args.eps_rel,
    )
    cfg = FusionConfig(mode=FusionMode(args.mode))
    stream, report = run_pipeline(seq, opts, cfg, weights)
    write_tokens(stream, seq.dim, args.output)
    text = report.to_text()
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_plan(args) -> int:
    groups = args.groups
    req = BudgetRequest(
        budget=args.budget,
        anchors=args.anchors,
        k_raw=args.kraw,
        summary_budget=args.summary if args.summary is not None else groups,
        static_budget=args.static,
        groups=groups,
        pool_positions=_parse_pool_count(args.pool),
        k_max=args.kmax,
        group_length=args.lgroup,
    )
    plan = allocate(req)
    lines = [
        "# freres plan v1",
        f"budget={req.budget}",
        f"spatial_budget={plan.spatial_budget}",
        f"summary_budget={req.summary_budget}",
        f"static_budget={req.static_budget}",
        f"freq_budget={plan.freq_budget}",
        f"k={plan.k}",
        f"candidates={req.groups * plan.k * req.pool_positions}",
        f"predicted_max_tokens={plan.predicted_max_tokens}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    if (args.input is None) == (args.synthetic is None):
        raise errors.InvalidSpec("pass exactly one of an input file or --synthetic KIND")
    if args.synthetic:
        seq = gen_synthetic(SyntheticSpec(
            kind=args.synthetic, frames=args.frames, grid=_parse_grid(args.grid),
            dim=args.dim, seed=args.seed,
        ))
        source = f"synthetic kind={args.synthetic} seed={args.seed}"
    else:
        seq = read_latents(args.input)
        source = f"file {args.input}"
    anchors = select_anchors(seq, args.anchors, args.tau)
    report = energy_spectrum(seq, anchors, _parse_pool(args.pool))
    write_spectrum_csv(report, args.output, source=source)
    if report.degenerate:
        sys.stdout.write("degenerate spectrum: zero residual energy\n")
    else:
        sys.stdout.write(f"top5_ratio={report.topk_ratio(5):.6f}\n")
    return EXIT_OK


def _cmd_account(args) -> int:
    total = account_context(args.frames, args.per_frame, args.text)
    sys.stdout.write(f"{total}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="freres", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_gen(sub)
    _add_encode(sub)
    _add_plan(sub)
    _add_analyze(sub)
    _add_account(sub)
    args = parser.parse_args(argv)
    handler = {
        "gen": _cmd_gen,
        "encode": _cmd_encode,
        "plan": _cmd_plan,
        "analyze": _cmd_analyze,
        "account": _cmd_account,
    }[args.command]
    try:
        return handler(args)
    except _BUDGET_ERRORS as e:
        sys.stderr.write(f"budget error: {e}\n")
        return EXIT_BUDGET
    except _IO_ERRORS as e:
        sys.stderr.write(f"io error: {e}\n")
        return EXIT_IO
    except errors.CodecError as e:
        sys.stderr.write(f"validation error: {e}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
