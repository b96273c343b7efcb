"""Command-line entry point: ``evonas {search,compare,plot,retrain}``.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime error.
Log verbosity comes from the ``EVONAS_LOG_LEVEL`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from ..engine import run_search
from ..errors import ConfigError, OutOfRange
from ..evaluators import make_dataset, retrain
from ..space import Genome
from .artifacts import dumps_doc, pareto_payload, summarize, write_run_log
from .compare import compare_runs, format_report
from .config import RunConfig, build_evaluator, config_from_header, load_config
from .plots import emit_plotdata

log = logging.getLogger("evonas")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
RUN_FILES = ("run.log", "pareto.json", "summary.json", "timing.json")


def run_one(run: RunConfig, out_dir) -> dict:
    """Search with one seed and write its artifacts; removes them on failure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        result = run_search(run.engine, build_evaluator(run))
        write_run_log(out_dir / "run.log", run, result.run_log)
        (out_dir / "pareto.json").write_text(dumps_doc(pareto_payload(result, run)))
        summary = summarize(result, run)
        (out_dir / "summary.json").write_text(dumps_doc(summary))
        (out_dir / "timing.json").write_text(
            dumps_doc({"wall_clock_ms": result.counters["wall_clock_ms"]}))
    except BaseException:
        for name in RUN_FILES:
            (out_dir / name).unlink(missing_ok=True)
        raise
    return summary


def cmd_search(args) -> int:
    run = load_config(args.config)
    out = args.out or run.output
    if out is None:
        raise ConfigError("no output directory: pass --out or set `output` in the config")
    if args.seed is not None:
        targets = [(args.seed, Path(out))]
    else:
        targets = [(s, Path(out) / f"seed-{s}") for s in run.seeds]
    for seed, path in targets:
        summary = run_one(run.for_seed(seed), path)
        log.info("seed %d: best accuracy %.4f, %d train steps -> %s", seed,
                 summary["best_accuracy"], summary["train_steps"], path)
    return EXIT_OK


def cmd_compare(args) -> int:
    report = compare_runs(args.runs)
    Path(args.out).write_text(dumps_doc(report))
    print(format_report(report))
    return EXIT_OK


def cmd_plot(args) -> int:
    for p in emit_plotdata(args.run, svg=args.svg):
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_retrain(args) -> int:
    payload = json.loads(Path(args.pareto).read_text())
    run = config_from_header(payload["config"])
    if run.evaluator != "mlp":
        raise ConfigError("retrain needs a run made with the mlp evaluator")
    front = payload["front"]
    if not 0 <= args.rank < len(front):
        raise OutOfRange(f"rank {args.rank} outside [0, {len(front)})")
    genome = Genome(front[args.rank]["choices"])
    dataset = make_dataset(run.data.spec, run.data.seed)
    seed = run.engine.seed if args.seed is None else args.seed
    metrics = retrain(genome, dataset, args.epochs, seed, run.mlp)
    metrics["rank"] = args.rank
    out = Path(args.out) if args.out else Path(args.pareto).with_name(f"retrain-rank{args.rank}.json")
    out.write_text(dumps_doc(metrics))
    log.info("test accuracy %.4f -> %s", metrics["test_accuracy"], out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evonas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the evolutionary search")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="single seed; default: every seed in the config")
    p.add_argument("--out", help="output directory (overrides `output` in the config)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("compare", help="compare run sets with different objective sets")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="write size/accuracy and per-quarter plot data")
    p.add_argument("--run", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("retrain", help="retrain one Pareto-front member from scratch")
    p.add_argument("--pareto", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_retrain)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("EVONAS_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, OutOfRange) as exc:
        print(f"evonas: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.debug("run failed", exc_info=True)
        print(f"evonas: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
