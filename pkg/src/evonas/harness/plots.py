"""Plot data for the search-dynamics figures.

``size_accuracy.csv``: every post-warm-up evaluation as (size, accuracy),
tagged with the search half it fell in. ``accuracy_epoch.csv``: the same
evaluations tagged by search quarter, with ``quarter_percentiles.csv`` holding
the nearest-rank 25/50/75th percentile accuracy of each quarter.
"""
from __future__ import annotations

import math
from pathlib import Path

from ..engine import quarter_of
from ..space import Genome
from .artifacts import read_run_log
from .config import config_from_header, size_function

HEADER_NOTE = "# warm-up evaluations excluded; periods are equal-width splits of the post-warm-up epochs"


def nearest_rank(values, q: float) -> float:
    """Nearest-rank percentile: the ceil(q/100 * n)-th smallest value."""
    if not values:
        raise ValueError("no values")
    ordered = sorted(values)
    rank = max(1, math.ceil(q / 100.0 * len(ordered)))
    return ordered[rank - 1]


def _fmt(x) -> str:
    return repr(float(x))


def _eval_rows(run_dir):
    header, records = read_run_log(Path(run_dir) / "run.log")
    run = config_from_header(header["config"])
    size = size_function(run)
    w, t = run.engine.warmup_epochs, run.engine.total_epochs
    half_at = w + (t - w) / 2
    rows = []
    for r in records:
        if r["event"] != "eval":
            continue
        e = r["epoch"]
        rows.append({
            "epoch": e,
            "genome_id": r["genome_id"],
            "accuracy": r["accuracy"],
            "size_mb": size(Genome(r["choices"])),
            "half": 0 if e <= half_at else 1,
            "quarter": quarter_of(e, w, t),
        })
    return rows


def emit_plotdata(run_dir, svg: bool = False) -> list[Path]:
    run_dir = Path(run_dir)
    rows = _eval_rows(run_dir)
    size_rows = [HEADER_NOTE, "epoch,half,genome_id,size_mb,accuracy"]
    size_rows += [f"{r['epoch']},{r['half']},{r['genome_id']},{_fmt(r['size_mb'])},{_fmt(r['accuracy'])}"
             for r in rows]
    epoch_rows = [HEADER_NOTE, "epoch,quarter,genome_id,accuracy"]
    epoch_rows += [f"{r['epoch']},{r['quarter']},{r['genome_id']},{_fmt(r['accuracy'])}" for r in rows]
    pct = [HEADER_NOTE, "quarter,n,p25,p50,p75"]
    for q in range(4):
        acc = [r["accuracy"] for r in rows if r["quarter"] == q]
        if acc:
            pct.append(f"{q},{len(acc)}," + ",".join(_fmt(nearest_rank(acc, p)) for p in (25, 50, 75)))
    paths = []
    for name, lines in (("size_accuracy.csv", size_rows), ("accuracy_epoch.csv", epoch_rows),
                        ("quarter_percentiles.csv", pct)):
        p = run_dir / name
        p.write_text("\n".join(lines) + "\n")
        paths.append(p)
    if svg:
        paths += _render_svg(run_dir, rows)
    return paths


def _render_svg(run_dir: Path, rows) -> list[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for half, color in ((0, "tab:purple"), (1, "gold")):
        pts = [r for r in rows if r["half"] == half]
        ax.scatter([r["size_mb"] for r in pts], [r["accuracy"] for r in pts],
                   s=8, c=color, label=("first" if half == 0 else "second") + " half")
    ax.set_xlabel("model size (MB)")
    ax.set_ylabel("validation accuracy")
    ax.legend()
    fig.tight_layout()
    p2 = run_dir / "size_accuracy.svg"
    fig.savefig(p2)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    for q, color in enumerate(("tab:blue", "tab:orange", "tab:green", "tab:red")):
        pts = [r for r in rows if r["quarter"] == q]
        if not pts:
            continue
        ax.scatter([r["epoch"] for r in pts], [r["accuracy"] for r in pts], s=6, c=color)
        lo, hi = min(r["epoch"] for r in pts), max(r["epoch"] for r in pts)
        acc = [r["accuracy"] for r in pts]
        for p, style in ((25, "--"), (50, "-"), (75, "--")):
            v = nearest_rank(acc, p)
            ax.plot([lo, hi], [v, v], style, c=color, lw=1)
    ax.set_xlabel("search epoch")
    ax.set_ylabel("validation accuracy")
    fig.tight_layout()
    p3 = run_dir / "accuracy_epoch.svg"
    fig.savefig(p3)
    plt.close(fig)
    return [p2, p3]
