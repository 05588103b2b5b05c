"""A quick tour of the synthetic measurement oracle.

The oracle stands in for a physical test rig: hand it an array
configuration (one genome per rotor position, an inter-rotor spacing and a
list of wind speeds) and it returns a readings matrix, one row per wind
speed and one column per position.
"""

import numpy as np

from aeromine import (ArrayConfiguration, Genome, OracleConstants,
                      SyntheticOracle, default_turbine_space)
from aeromine.oracle import aggregate_fitness, brute_force_optimum
from aeromine.rng import RandomKey

space = default_turbine_space()
oracle = SyntheticOracle(space)
key = RandomKey(seed=0, position=0, iteration=0, purpose="demo")

# The single-turbine optimum: blades x chord hits the reference solidity
# and the shape parameter sits on the quality peak.
best = Genome((4, 0.3, 0.6, "CW"))
single = ArrayConfiguration((best,), spacing=0.25, wind_speeds=(1.0,))
m = oracle.evaluate(single, key)
print("standalone optimum fitness:", aggregate_fitness(m.readings))

# Pairs interact through spacing and relative rotation.  Counter-rotating
# neighbours reinforce each other; co-rotating ones interfere.
counter = Genome((4, 0.3, 0.6, "CCW"))
for label, partner in (("counter", counter), ("co     ", best)):
    pair = ArrayConfiguration((best, partner), spacing=0.75, wind_speeds=(1.0,))
    f = aggregate_fitness(oracle.evaluate(pair, key).readings)
    print(f"{label}-rotating pair fitness: {f}")

# Power follows a cube law in wind speed, so the readings matrix scales
# accordingly row by row.
speeds = (0.5, 1.0, 2.0)
m = oracle.evaluate(ArrayConfiguration((best,), 0.25, speeds), key)
print("readings across speeds", speeds, "->", m.readings.ravel())

# An exhaustive grid search provides the reference answer any optimizer
# should be judged against.
config, fitness = brute_force_optimum(space, (0.25, 2.0),
                                      OracleConstants(), resolution=21)
print("grid-21 optimum:", config.genomes[0].values, "fitness", fitness)

# Measurement noise is optional and keyed by record id, so a rerun of the
# same experiment reproduces the same noisy reading.
noisy = SyntheticOracle(space, OracleConstants(noise_eta=0.05))
a = noisy.evaluate(single, key.with_counter(7))
b = noisy.evaluate(single, key.with_counter(7))
assert np.array_equal(a.readings, b.readings)
print("noisy reading (reproducible):", a.readings.ravel())
