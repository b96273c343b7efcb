"""
Scoring a learning curve by its potential
=========================================

The ledger keeps every (epoch, accuracy) sample a genome has collected. Its
potential is the slope of a line through the origin fitted to those samples.
A genome that improves quickly under shared training gets a high score even
before its accuracy overtakes others.
"""

import numpy as np

from evonas.ledger import Ledger, objective_vector, potential, potential_with_intercept

ledger = Ledger()
epochs = np.arange(11, 21)
curves = {
    "steady": 0.02 * epochs,
    "plateau": np.minimum(0.04 * epochs, 0.5),
    "late bloomer": 0.1 + 0.001 * (epochs - 10) ** 2.5,
}
for name, accs in curves.items():
    for e, f in zip(epochs, accs):
        ledger.record_sample(name, int(e), float(np.clip(f, 0, 1)))

# %%
# The through-origin slope and the ordinary least-squares slope disagree on
# curves that start high: the former rewards the level, the latter only the trend.
for name in curves:
    h = ledger.history(name)
    print(f"{name:13s} last={h.accuracies[-1]:.3f} "
          f"origin slope={potential(h):.4f} ols slope={potential_with_intercept(h):.4f}")

# %%
# Objective vectors are what NSGA-II compares.
for name in curves:
    print(objective_vector(name, ledger, 1.0, ["accuracy", "potential"]).as_dict())
