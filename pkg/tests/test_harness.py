import json
from fractions import Fraction
from pathlib import Path

import pytest
import yaml

from evonas.errors import ConfigError, SeedMismatch
from evonas.harness.artifacts import (ledger_from_log, ledger_text, logged_selections,
                                      read_run_log, replay_selections, summary_from_log)
from evonas.harness.cli import main
from evonas.harness.compare import compare_runs
from evonas.harness.config import load_config, parse_config
from evonas.harness.plots import nearest_rank
from evonas.space import Genome, SearchSpace, model_size_mb

SIM = {"engine": {"total_epochs": 14, "warmup_epochs": 4}}
MLP = {"evaluator": "mlp", "engine": {"total_epochs": 8, "warmup_epochs": 4},
       "dataset": {"per_class": 60}}


def write_cfg(tmp_path, data, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return p


def search(tmp_path, data, seed, out, objectives=None):
    data = json.loads(json.dumps(data))
    if objectives:
        data["engine"]["objectives"] = objectives
    cfg = write_cfg(tmp_path, data, f"cfg-{out.replace('/', '-')}.yaml")
    run_dir = tmp_path / out
    assert main(["search", "--config", str(cfg), "--seed", str(seed), "--out", str(run_dir)]) == 0
    return run_dir


@pytest.fixture(scope="module")
def sim_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sim")
    return search(tmp, SIM, 3, "run")


# -- config ---------------------------------------------------------------------------

def test_defaults_parse():
    run = parse_config({})
    assert run.evaluator == "simulator" and run.seeds == (0,)
    assert run.engine.population_size == 20


@pytest.mark.parametrize("data", [
    {"bogus": 1},
    {"engine": {"popsize": 20}},
    {"engine": {"seed": 3}},
    {"simulator": {"eta": 0.1}},
    {"mlp": {"depth": 3}},
    {"dataset": {"noise": 1}},
    {"evaluator": "gpu"},
    {"seeds": []},
    {"seeds": [1, 1]},
    {"seeds": [-1]},
    {"engine": {"survivors": 30}},
    {"engine": "fast"},
])
def test_bad_configs_rejected(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("engine: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_example_config_files_parse():
    for p in sorted(Path(__file__).resolve().parents[1].glob("configs/*.yaml")):
        load_config(p)


# -- CLI --------------------------------------------------------------------------------

def test_missing_config_is_usage_error(tmp_path):
    assert main(["search", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == 2
    assert main(["search"]) == 2
    assert main(["frobnicate"]) == 2


def test_invalid_config_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, {"engine": {"warmup_epochs": 0}})
    assert main(["search", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_search_writes_artifacts(sim_run):
    for name in ("run.log", "pareto.json", "summary.json", "timing.json"):
        assert (sim_run / name).exists()
    header, records = read_run_log(sim_run / "run.log")
    assert header["format"] == "evonas-runlog" and header["version"] == 1
    assert [r["seq"] for r in records] == list(range(len(records)))
    keys = [(r["epoch"], r["seq"]) for r in records]
    assert keys == sorted(keys)
    assert "wall_clock_ms" not in (sim_run / "run.log").read_text()


def test_search_is_byte_identical(tmp_path, sim_run):
    again = search(tmp_path, SIM, 3, "again")
    assert (again / "run.log").read_bytes() == (sim_run / "run.log").read_bytes()
    assert (again / "summary.json").read_bytes() == (sim_run / "summary.json").read_bytes()


def test_multi_seed_search_uses_subdirectories(tmp_path):
    cfg = write_cfg(tmp_path, {**SIM, "seeds": [1, 2]})
    assert main(["search", "--config", str(cfg), "--out", str(tmp_path / "set")]) == 0
    assert sorted(p.name for p in (tmp_path / "set").iterdir()) == ["seed-1", "seed-2"]


def test_runtime_failure_removes_partial_outputs(tmp_path, monkeypatch):
    import evonas.harness.cli as cli

    def boom(*a, **k):
        raise RuntimeError("disk on fire")
    monkeypatch.setattr(cli, "pareto_payload", boom)
    cfg = write_cfg(tmp_path, SIM)
    out = tmp_path / "broken"
    assert main(["search", "--config", str(cfg), "--seed", "0", "--out", str(out)]) == 3
    assert list(out.iterdir()) == []


# -- log replay -------------------------------------------------------------------------

def recount(path):
    """Independent reading of run.log: raw json lines, own quarter arithmetic."""
    lines = Path(path).read_text().splitlines()
    cfg = json.loads(lines[0])["config"]["engine"]
    w, t = cfg["warmup_epochs"], cfg["total_epochs"]
    width = Fraction(t - w, 4)
    per_q = [set(), set(), set(), set()]
    everything, steps = set(), 0
    for line in lines[1:]:
        r = json.loads(line)
        if r["event"] not in ("train", "warmup_train"):
            continue
        steps += 1
        everything.add(r["genome_id"])
        if r["epoch"] > w:
            q = int((r["epoch"] - w - 1) / width)
            per_q[q].add(r["genome_id"])
    return steps, len(everything), [len(s) for s in per_q]


def test_summary_matches_independent_recount(sim_run):
    summary = json.loads((sim_run / "summary.json").read_text())
    steps, distinct, per_q = recount(sim_run / "run.log")
    assert summary["train_steps"] == steps
    assert summary["distinct_genomes_trained"] == distinct
    assert summary["distinct_per_quarter"] == per_q


def test_replay_matches_artifacts(sim_run):
    header, records = read_run_log(sim_run / "run.log")
    from evonas.harness.artifacts import dumps_doc
    assert dumps_doc(summary_from_log(header, records)) == (sim_run / "summary.json").read_text()
    assert replay_selections(header, records) == logged_selections(header, records)
    ledger = ledger_from_log(records)
    assert ledger_text(ledger) == ledger_text(ledger_from_log(records))
    front = json.loads((sim_run / "pareto.json").read_text())["front"]
    assert sorted(f["genome_id"] for f in front) == summary_from_log(header, records)["front_ids"]


# -- compare ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def run_sets(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sets")
    sets = {}
    for label, objs in (("A", ["accuracy"]), ("AP", ["accuracy", "potential"])):
        for seed in (0, 1, 2):
            search(tmp, SIM, seed, f"{label}/seed-{seed}", objs)
        sets[label] = tmp / label
    search(tmp, SIM, 5, "odd/seed-5", ["accuracy"])
    sets["odd"] = tmp / "odd"
    return sets


def test_compare_to_self_has_zero_deltas(run_sets, tmp_path):
    report = compare_runs([run_sets["A"], run_sets["A"]])
    for c in report["comparisons"]:
        assert all(v == 0 for v in c["delta"].values())
        assert all(v == 0 for d in c["per_seed_delta"].values() for v in d.values())


def test_compare_seed_mismatch(run_sets):
    with pytest.raises(SeedMismatch):
        compare_runs([run_sets["A"], run_sets["odd"]])


def test_compare_totals_match_logs(run_sets, tmp_path):
    out = tmp_path / "report.json"
    assert main(["compare", "--runs", str(run_sets["A"]), str(run_sets["AP"]),
                 "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    for s, key in zip(report["sets"], ("A", "AP")):
        lasts, steps = [], []
        for seed_dir in sorted(run_sets[key].iterdir()):
            st, _, per_q = recount(seed_dir / "run.log")
            lasts.append(per_q[-1])
            steps.append(st)
        assert s["mean"]["last_quarter_distinct"] == pytest.approx(sum(lasts) / len(lasts))
        assert s["mean"]["train_steps"] == pytest.approx(sum(steps) / len(steps))
    assert report["baseline"] == "A" and report["comparisons"][1]["label"] == "AP"


def test_compare_is_seed_order_invariant(run_sets, tmp_path):
    shuffled = tmp_path / "A-shuffled"
    shuffled.mkdir()
    for src, name in zip(sorted(run_sets["A"].iterdir()), ("z", "a", "m")):
        (shuffled / name).symlink_to(src)
    a = compare_runs([run_sets["A"], run_sets["AP"]])
    b = compare_runs([shuffled, run_sets["AP"]])
    assert a["sets"][0]["mean"] == b["sets"][0]["mean"]
    assert a["comparisons"][1]["delta"] == b["comparisons"][1]["delta"]


# -- plot data --------------------------------------------------------------------------

def read_csv(path):
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, l.split(","))) for l in lines[1:]]


def test_plot_outputs(sim_run):
    assert main(["plot", "--run", str(sim_run)]) == 0
    _, records = read_run_log(sim_run / "run.log")
    evals = sorted((r["epoch"], r["genome_id"]) for r in records if r["event"] == "eval")
    epoch_rows = read_csv(sim_run / "accuracy_epoch.csv")
    assert sorted((int(r["epoch"]), r["genome_id"]) for r in epoch_rows) == evals

    by_id = {r["genome_id"]: r["choices"] for r in records}
    space = SearchSpace()
    for row in read_csv(sim_run / "size_accuracy.csv"):
        assert float(row["size_mb"]) == model_size_mb(Genome(by_id[row["genome_id"]]), space)

    for row in read_csv(sim_run / "quarter_percentiles.csv"):
        acc = sorted(float(r["accuracy"]) for r in epoch_rows if r["quarter"] == row["quarter"])
        assert int(row["n"]) == len(acc)
        for q in (25, 50, 75):
            # nearest rank with exact rational arithmetic
            k = -(-(Fraction(q, 100) * len(acc)).numerator // (Fraction(q, 100) * len(acc)).denominator)
            assert float(row[f"p{q}"]) == acc[max(k, 1) - 1]


def test_plot_header_notes_warmup_exclusion(sim_run):
    main(["plot", "--run", str(sim_run)])
    assert "warm-up" in (sim_run / "size_accuracy.csv").read_text().splitlines()[0]


def test_nearest_rank_examples():
    assert nearest_rank([1, 2, 3, 4], 50) == 2
    assert nearest_rank([5], 25) == 5
    assert nearest_rank([3, 1, 2], 75) == 3
    with pytest.raises(ValueError):
        nearest_rank([], 50)


def test_plot_svg(sim_run):
    pytest.importorskip("matplotlib")
    assert main(["plot", "--run", str(sim_run), "--svg"]) == 0
    assert list(sim_run.glob("*.svg"))


# -- retrain ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def mlp_run(tmp_path_factory):
    return search(tmp_path_factory.mktemp("mlp"), MLP, 0, "run")


def test_retrain_cli(mlp_run, tmp_path):
    pareto = mlp_run / "pareto.json"
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["retrain", "--pareto", str(pareto), "--rank", "0", "--epochs", "2",
                 "--out", str(out1)]) == 0
    assert main(["retrain", "--pareto", str(pareto), "--rank", "0", "--epochs", "2",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    metrics = json.loads(out1.read_text())
    front = json.loads(pareto.read_text())["front"]
    assert metrics["genome"] == front[0]["choices"] and metrics["epochs"] == 2


def test_retrain_single_member_front(mlp_run, tmp_path):
    payload = json.loads((mlp_run / "pareto.json").read_text())
    payload["front"] = payload["front"][:1]
    p = tmp_path / "one.json"
    p.write_text(json.dumps(payload))
    assert main(["retrain", "--pareto", str(p), "--rank", "0", "--epochs", "0"]) == 0
    metrics = json.loads((tmp_path / "retrain-rank0.json").read_text())
    assert metrics["final_train_loss"] is None
    assert 0.0 <= metrics["test_accuracy"] <= 1.0


def test_retrain_rank_out_of_range(mlp_run):
    n = len(json.loads((mlp_run / "pareto.json").read_text())["front"])
    assert main(["retrain", "--pareto", str(mlp_run / "pareto.json"), "--rank", str(n),
                 "--epochs", "1"]) == 2


def test_retrain_rejects_simulator_runs(sim_run):
    assert main(["retrain", "--pareto", str(sim_run / "pareto.json"), "--rank", "0",
                 "--epochs", "1"]) == 2
