"""The human-in-the-loop oracle, scripted.

When the oracle is manual, the engine does not compute readings itself:
it posts a pending card describing the exact array to build and blocks
until someone submits the measured matrix.  Here the on_propose hook
plays the part of the person at the rig by measuring with the synthetic
oracle and typing the numbers back in.
"""

from aeromine import RunConfig, SyntheticOracle, default_turbine_space
from aeromine.engine import Engine
from aeromine.oracle import ManualOracle, ManualQueue
from aeromine.rng import RandomKey

space = default_turbine_space()
cfg = RunConfig(space=space, positions=1, seed=5, budget=8,
                seeds_per_position=4)

queue = ManualQueue()
rig = SyntheticOracle(space)


def technician(pending):
    """Measure whatever the queue asks for."""
    readings = rig.evaluate(pending.configuration,
                            RandomKey(0, purpose="rig")).readings
    print(f"  [rig] {pending.pending_id}: "
          f"{[g.values for g in pending.configuration.genomes]}"
          f" -> {readings.ravel().round(4).tolist()}")
    queue.submit(pending.pending_id, readings)


queue.on_propose = technician
result = Engine(cfg, oracle=ManualOracle(queue)).run()
queue.close()

print("\nbest design found:", result.best_configuration.genomes[0].values)
print("best fitness:      ", round(result.best_fitness, 4))
