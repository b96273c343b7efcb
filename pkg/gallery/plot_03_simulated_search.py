"""
A full search on the instability simulator
==========================================

The simulator stands in for a weight-sharing supernet. Training one subnet
nudges the ops it uses toward maturity and wears down the sibling ops in the
same slots. Here we run the default search twice, once ranking by accuracy
alone and once adding potential, and compare how many distinct genomes get
trained in the last quarter of the search.
"""

from evonas.engine import EngineConfig, run_search
from evonas.evaluators import SimulatorEvaluator
from evonas.harness import RunConfig, summarize

results = {}
for objectives in (("accuracy",), ("accuracy", "potential")):
    run = RunConfig(engine=EngineConfig(objectives=objectives, seed=0))
    res = run_search(run.engine, SimulatorEvaluator())
    results[objectives] = summarize(res, run)

# %%
for objectives, s in results.items():
    print(f"{'+'.join(objectives):20s} best={s['best_accuracy']:.3f} "
          f"distinct per quarter={s['distinct_per_quarter']} steps={s['train_steps']}")

# %%
# Plot data for a single run is written by ``evonas plot``; the same numbers
# can be drawn directly from the summary.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots()
    for objectives, s in results.items():
        ax.plot(range(1, 5), s["distinct_per_quarter"], marker="o", label="+".join(objectives))
    ax.set_xlabel("search quarter")
    ax.set_ylabel("distinct genomes trained")
    ax.legend()
