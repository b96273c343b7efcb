"""Experiment layer: configs, run artifacts, log replay, comparisons, plot data and the CLI."""
from .artifacts import (ledger_from_log, logged_selections, pareto_payload, read_run_log,
                        replay_selections, summarize, summary_from_log, write_run_log)
from .compare import compare_runs
from .config import RunConfig, build_evaluator, load_config, parse_config
from .plots import emit_plotdata, nearest_rank

__all__ = [
    "RunConfig", "build_evaluator", "compare_runs", "emit_plotdata", "ledger_from_log",
    "load_config", "logged_selections", "nearest_rank", "pareto_payload", "parse_config",
    "read_run_log", "replay_selections", "summarize", "summary_from_log", "write_run_log",
]
