"""Fit a surrogate to a handful of measurements, then invert it.

The surrogate is a small tanh network trained by plain gradient descent.
Inversion means running the evolutionary search against the model's
prediction instead of the expensive oracle, which is the core trick that
makes the mining loop sample-efficient.
"""

import numpy as np

from aeromine import (ArrayConfiguration, SyntheticOracle,
                      default_turbine_space)
from aeromine.design_space import denormalize, normalize, random_genome
from aeromine.optimizer import EAParams, evolve_with_score
from aeromine.oracle import aggregate_fitness
from aeromine.rng import RandomKey
from aeromine.surrogate import Dataset, FitHyper, fit, predict_batch

space = default_turbine_space()
oracle = SyntheticOracle(space)
rng = np.random.default_rng(0)
key = RandomKey(seed=0, purpose="demo")


def measure(genome):
    arr = ArrayConfiguration((genome,), 0.25, (1.0,))
    return aggregate_fitness(oracle.evaluate(arr, key).readings)


# Collect a training set of random designs with true measurements.
genomes = [random_genome(space, rng) for _ in range(200)]
inputs = np.array([normalize(g, space) for g in genomes])
targets = np.array([measure(g) for g in genomes])
model = fit(Dataset(inputs, targets), FitHyper(), key.derive("fit"))
print(f"trained for {model.epochs_run} epochs, final loss {model.final_loss:.4f}")

# Invert: the EA scores candidates with the model only.  Starting the
# population from the measured designs anchors the search where the model
# has data, exactly as the mining engine does.
ranked = evolve_with_score(
    lambda vecs: predict_batch(model, np.array(vecs)),
    EAParams(), space, key.derive("evolve"),
    init_population=list(inputs))
proposal = denormalize(ranked[0].vector, space)

print("model's favourite design:", proposal.values)
print("its true fitness:        ", round(measure(proposal), 4))
print("best training point:     ", round(float(targets.max()), 4))
