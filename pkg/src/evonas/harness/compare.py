"""Compare run sets that differ only in their objective set."""
from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import SeedMismatch

LETTERS = {"accuracy": "A", "potential": "P", "size_mb": "S"}
METRICS = ("best_accuracy", "train_steps", "last_quarter_distinct", "best_size_mb")


def objective_label(objectives) -> str:
    return "".join(LETTERS[o] for o in ("accuracy", "potential", "size_mb") if o in objectives)


def load_run_set(path) -> list[dict]:
    """Summaries of every run in `path` (a run directory or a directory of them)."""
    path = Path(path)
    if (path / "summary.json").exists():
        files = [path / "summary.json"]
    else:
        files = sorted(path.glob("*/summary.json"))
    if not files:
        raise FileNotFoundError(f"no summary.json under {path}")
    runs = [json.loads(f.read_text()) for f in files]
    objs = {tuple(r["objectives"]) for r in runs}
    if len(objs) != 1:
        raise ValueError(f"{path} mixes objective sets {sorted(objs)}")
    return sorted(runs, key=lambda r: r["seed"])


def _row(summary: dict) -> dict:
    return {
        "best_accuracy": summary["best_accuracy"],
        "train_steps": summary["train_steps"],
        "distinct_per_quarter": summary["distinct_per_quarter"],
        "last_quarter_distinct": summary["distinct_per_quarter"][-1],
        "best_size_mb": summary["best_size_mb"],
    }


def _mean(values) -> float:
    values = sorted(values)
    return math.fsum(values) / len(values)


def compare_runs(run_dirs) -> dict:
    if len(run_dirs) < 2:
        raise ValueError("need at least two run sets")
    sets = []
    for d in run_dirs:
        runs = load_run_set(d)
        per_seed = {str(r["seed"]): _row(r) for r in runs}
        sets.append({
            "dir": str(d),
            "label": objective_label(runs[0]["objectives"]),
            "objectives": runs[0]["objectives"],
            "seeds": [r["seed"] for r in runs],
            "per_seed": per_seed,
            "mean": {m: _mean(row[m] for row in per_seed.values()) for m in METRICS},
            "mean_distinct_per_quarter": [
                _mean(row["distinct_per_quarter"][q] for row in per_seed.values())
                for q in range(4)],
        })
    base = sets[0]
    for s in sets[1:]:
        if s["seeds"] != base["seeds"]:
            raise SeedMismatch(f"{s['dir']} used seeds {s['seeds']}, "
                               f"{base['dir']} used {base['seeds']}")

    comparisons = []
    for s in sets:
        delta = {m: s["mean"][m] - base["mean"][m] for m in METRICS}
        b_last = base["mean"]["last_quarter_distinct"]
        comparisons.append({
            "label": s["label"],
            "vs": base["label"],
            "delta": delta,
            "per_seed_delta": {
                seed: {m: s["per_seed"][seed][m] - base["per_seed"][seed][m] for m in METRICS}
                for seed in base["per_seed"]},
            "last_quarter_distinct_reduction_pct":
                100.0 * (b_last - s["mean"]["last_quarter_distinct"]) / b_last if b_last else 0.0,
            "fewer_distinct_last_quarter": s["mean"]["last_quarter_distinct"] < b_last,
            "best_accuracy_within_0.02": delta["best_accuracy"] >= -0.02,
        })
    return {"baseline": base["label"], "sets": sets, "comparisons": comparisons}


def format_report(report: dict) -> str:
    lines = [f"{'set':<5}{'seeds':>6}{'best acc':>10}{'train steps':>13}"
             f"{'Q4 distinct':>13}{'best MB':>10}"]
    for s in report["sets"]:
        m = s["mean"]
        lines.append(f"{s['label']:<5}{len(s['seeds']):>6}{m['best_accuracy']:>10.4f}"
                     f"{m['train_steps']:>13.1f}{m['last_quarter_distinct']:>13.1f}"
                     f"{m['best_size_mb']:>10.3f}")
    lines.append("")
    for c in report["comparisons"][1:]:
        lines.append(
            f"{c['label']} vs {c['vs']}: Q4 distinct {c['delta']['last_quarter_distinct']:+.1f} "
            f"({c['last_quarter_distinct_reduction_pct']:+.1f}% reduction), "
            f"best acc {c['delta']['best_accuracy']:+.4f}")
    return "\n".join(lines)
