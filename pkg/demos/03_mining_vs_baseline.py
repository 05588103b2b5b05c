"""Surrogate-assisted mining against the plain evolutionary baseline.

Both searches share the same seed, the same oracle and the same call
budget; the only difference is whether proposals come from inverting a
surrogate model or from evaluating every child of the EA directly.
"""

from aeromine import (OracleConstants, RunConfig, SyntheticOracle,
                      default_turbine_space)
from aeromine.cli import calls_to_target
from aeromine.engine import Engine

space = default_turbine_space()
# A narrow solidity peak makes the problem hard enough that random
# sampling alone will not stumble onto the target.
constants = OracleConstants(sigma_ref=0.36)
target = 0.95

for seed in (0, 4, 6):
    cfg = RunConfig(space=space, positions=1, seed=seed, budget=150,
                    seeds_per_position=5, constants=constants)
    row = [f"seed {seed}:"]
    for baseline in (False, True):
        records = []
        result = Engine(cfg, oracle=SyntheticOracle(space, constants),
                        baseline=baseline, on_record=records.append).run()
        calls = calls_to_target(records, target)
        label = "baseline" if baseline else "mining  "
        row.append(f"{label} best {result.best_fitness:.4f} "
                   f"(hit {target} at call {calls})")
    print("  ".join(row))

print("\nthe mining run typically needs a fraction of the baseline's calls")
