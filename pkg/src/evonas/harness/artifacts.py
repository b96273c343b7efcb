"""Run artifacts (run.log, pareto.json, summary.json) and their replay from the log."""
from __future__ import annotations

import json
from pathlib import Path

from ..engine import SearchResult, quarter_of
from ..ledger import DIRECTIONS, Ledger, ObjectiveVector
from ..pareto import Candidate, non_dominated_sort, select
from ..space import Genome
from .config import RunConfig, config_from_header, size_function

LOG_FORMAT = "evonas-runlog"
LOG_VERSION = 1
TRAIN_EVENTS = ("warmup_train", "train")
EVAL_EVENTS = ("warmup_eval", "eval")


def dumps_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dumps_doc(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_run_log(path, run: RunConfig, records) -> None:
    header = {"format": LOG_FORMAT, "version": LOG_VERSION, "config": run.to_dict()}
    with open(path, "w") as fh:
        fh.write(dumps_line(header) + "\n")
        for r in records:
            fh.write(dumps_line(r) + "\n")


def read_run_log(path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("format") != LOG_FORMAT:
        raise ValueError(f"{path} is not a run log")
    if header.get("version") != LOG_VERSION:
        raise ValueError(f"unsupported run-log version {header.get('version')}")
    return header, [json.loads(line) for line in lines[1:] if line]


def _best(front_ids, ledger: Ledger) -> str:
    return min(front_ids, key=lambda gid: (-ledger.history(gid).accuracies[-1], gid))


def _summary(run: RunConfig, train_steps: int, trained: set, quarters: list[set],
             front: dict[str, Genome], ledger: Ledger) -> dict:
    best = _best(front, ledger)
    size = size_function(run)
    return {
        "seed": run.engine.seed,
        "evaluator": run.evaluator,
        "objectives": list(run.engine.objectives),
        "train_steps": train_steps,
        "distinct_genomes_trained": len(trained),
        "distinct_per_quarter": [len(q) for q in quarters],
        "best_accuracy": ledger.history(best).accuracies[-1],
        "best_genome_id": best,
        "best_size_mb": size(front[best]),
        "front_ids": sorted(front),
    }


def summarize(result: SearchResult, run: RunConfig) -> dict:
    cfg = result.config
    quarters = [set() for _ in range(4)]
    trained = set()
    for epoch, ids in result.trained_by_epoch.items():
        trained |= ids
        if epoch > cfg.warmup_epochs:
            quarters[quarter_of(epoch, cfg.warmup_epochs, cfg.total_epochs)] |= ids
    front = {c.id: c.genome for c in result.pareto_front}
    return _summary(run, result.counters["train_steps"], trained, quarters, front, result.ledger)


def pareto_payload(result: SearchResult, run: RunConfig) -> dict:
    size = size_function(run)
    ranked = sorted(result.pareto_front,
                    key=lambda c: (-result.ledger.history(c.id).accuracies[-1], c.id))
    return {
        "config": run.to_dict(),
        "front": [
            {
                "rank": i,
                "genome_id": c.id,
                "choices": list(c.genome.choices),
                "accuracy": result.ledger.history(c.id).accuracies[-1],
                "objectives": c.objectives.as_dict(),
                "size_mb": size(c.genome),
            }
            for i, c in enumerate(ranked)
        ],
    }


# -- replay ---------------------------------------------------------------------

def ledger_from_log(records) -> Ledger:
    return Ledger.from_records(
        {"epoch": r["epoch"], "genome_id": r["genome_id"], "accuracy": r["accuracy"]}
        for r in records if r["event"] in EVAL_EVENTS)


def _vector(objectives: dict, names) -> ObjectiveVector:
    return ObjectiveVector([objectives[n] for n in names], [DIRECTIONS[n] for n in names], names)


def _eval_candidates(records, epoch: int, names) -> list[Candidate]:
    out = []
    for r in records:
        if r["event"] == "eval" and r["epoch"] == epoch:
            c = Candidate(r["genome_id"], Genome(r["choices"]), _vector(r["objectives"], names))
            out.extend([c] * r["count"])
    return sorted(out, key=lambda c: c.id)


def replay_selections(header: dict, records) -> dict[int, list[str]]:
    """Survivor ids per generation, recomputed from the logged objective vectors."""
    engine = header["config"]["engine"]
    names = tuple(engine["objectives"])
    epochs = sorted({r["epoch"] for r in records if r["event"] == "eval"})
    return {e: [c.id for c in select(_eval_candidates(records, e, names), engine["survivors"])]
            for e in epochs}


def logged_selections(header: dict, records) -> dict[int, list[str]]:
    warmup = header["config"]["engine"]["warmup_epochs"]
    out: dict[int, list[str]] = {}
    for r in records:
        if r["event"] == "select" and r["epoch"] > warmup:
            out.setdefault(r["epoch"], []).append(r["genome_id"])
    return out


def summary_from_log(header: dict, records) -> dict:
    run = config_from_header(header["config"])
    cfg = run.engine
    trained, quarters, steps = set(), [set() for _ in range(4)], 0
    for r in records:
        if r["event"] in TRAIN_EVENTS:
            steps += 1
            trained.add(r["genome_id"])
            if r["epoch"] > cfg.warmup_epochs:
                quarters[quarter_of(r["epoch"], cfg.warmup_epochs, cfg.total_epochs)].add(
                    r["genome_id"])
    last = max(r["epoch"] for r in records if r["event"] == "eval")
    cands = {c.id: c for c in _eval_candidates(records, last, cfg.objectives)}
    uniq = [cands[k] for k in sorted(cands)]
    front = {uniq[i].id: uniq[i].genome for i in non_dominated_sort(uniq)[0]}
    return _summary(run, steps, trained, quarters, front, ledger_from_log(records))


def ledger_text(ledger: Ledger) -> str:
    return "".join(dumps_line(r) + "\n" for r in ledger.to_records())
