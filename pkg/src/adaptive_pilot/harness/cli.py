"""Command-line entry point: ``adaptive-pilot {run,sweep-snr,study-boundaries,study-models}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from ..channel import ChannelProfile, model_profile
from ..controller import boundary_set
from ..errors import SimulationError
from .config import LoadedConfig, load_config
from .link import Adaptive, FixedPattern, run_link, write_trace
from .results import emit_results, write_csv
from .studies import StudyKind, run_study

log = logging.getLogger("adaptive_pilot")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML/JSON config file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    p.add_argument("--model", type=int, choices=range(1, 6), help="channel model 1..5")
    p.add_argument("--boundary-set", type=int, choices=range(1, 6))
    p.add_argument("--symbols", type=int, help="OFDM symbols per run / per SNR point")
    p.add_argument(
        "--stationarity-mode",
        choices=["gauss-markov"],
        default="gauss-markov",
        help="how channel stationarity is realized",
    )
    p.add_argument("-v", "--verbose", action="store_true")


def _study_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--snr", type=float, nargs="+", help="SNR grid in dB")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-figures", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-pilot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a single link")
    _common(run)
    run.add_argument("--snr", type=float, help="SNR in dB")
    which = run.add_mutually_exclusive_group()
    which.add_argument("--fixed-pattern", type=int, choices=range(1, 5))
    which.add_argument("--adaptive", action="store_true", default=True)
    run.add_argument("--trace", action="store_true", help="also write the per-symbol decision trace")

    sweep = sub.add_parser("sweep-snr", help="adaptive vs fixed pattern over an SNR grid")
    _common(sweep)
    _study_opts(sweep)
    sweep.add_argument("--fixed-pattern", type=int, choices=range(1, 5))

    for name, text in (("study-boundaries", "compare boundary sets 1-5"), ("study-models", "compare channel models 1-5")):
        p = sub.add_parser(name, help=text)
        _common(p)
        _study_opts(p)
    return parser


def _loaded(args) -> LoadedConfig:
    cfg = load_config(args.config) if args.config else LoadedConfig()
    if args.seed is not None:
        cfg.link = replace(cfg.link, rng_seed=args.seed)
        cfg.study = replace(cfg.study, seed=args.seed)
    return cfg


def _cmd_run(args, cfg: LoadedConfig) -> dict:
    link = cfg.link if args.snr is None else replace(cfg.link, snr_db=args.snr)
    if args.model is not None:
        profile = model_profile(args.model, cfg.channel)
    else:
        profile = cfg.channel or ChannelProfile()
    if args.fixed_pattern:
        mode = FixedPattern(args.fixed_pattern)
    else:
        mode = Adaptive(boundary_set(args.boundary_set or 4))
    symbols = args.symbols or cfg.study.symbols_per_point
    trace = [] if args.trace else None
    metrics = run_link(link, profile, mode, symbols, link.rng_seed, trace=trace)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    record = {
        "mode": mode.name,
        "metrics": asdict(metrics),
        "link": link.as_dict(),
        "channel": asdict(profile),
        "stationarity_mode": args.stationarity_mode,
    }
    (args.out_dir / "run.json").write_text(json.dumps(record, indent=2, default=str) + "\n")
    if trace is not None:
        write_trace(trace, args.out_dir / "trace.csv")
    return record


def _cmd_study(args, cfg: LoadedConfig, kind: StudyKind) -> dict:
    study = replace(cfg.study, kind=kind)
    updates = {}
    if args.snr:
        updates["snr_grid"] = tuple(args.snr)
    if args.trials:
        updates["trials"] = args.trials
    if args.workers:
        updates["workers"] = args.workers
    if args.symbols:
        updates["symbols_per_point"] = args.symbols
    if args.model:
        updates["channel_model"] = args.model
    if args.boundary_set:
        updates["boundary_set"] = args.boundary_set
    if getattr(args, "fixed_pattern", None):
        updates["fixed_pattern"] = args.fixed_pattern
    study = replace(study, **updates)

    result = run_study(study, cfg.link, cfg.channel)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / f"{result.study}.csv"
    meta = {
        "link": cfg.link.as_dict(),
        "channel_base": asdict(cfg.channel or ChannelProfile()),
        "study": asdict(study),
        "stationarity_mode": args.stationarity_mode,
    }
    summary = result.summary
    emit_results(result.trial_rows, path, summary=summary, meta=meta, figures=not args.no_figures)
    write_csv(summary, args.out_dir / f"{result.study}_summary.csv")
    return {"csv": str(path), "rows": len(result.trial_rows), "summary_rows": len(summary)}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _loaded(args)
        if args.command == "run":
            out = _cmd_run(args, cfg)
        else:
            kind = {
                "sweep-snr": StudyKind.ADAPTIVE_VS_FIXED,
                "study-boundaries": StudyKind.BOUNDARY_SWEEP,
                "study-models": StudyKind.MODEL_SWEEP,
            }[args.command]
            out = _cmd_study(args, cfg, kind)
    except (SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(out, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
