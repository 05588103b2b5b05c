"""Every evaluation lands in an append-only journal; runs can resume.

The journal is line-delimited: a header first, then one record per
oracle call.  Because the engine draws all randomness from counter-based
keys, replaying a journal prefix and continuing live reproduces exactly
the run that would have happened without the interruption.
"""

import tempfile
from pathlib import Path

from aeromine import RunConfig, SyntheticOracle, default_turbine_space, run
from aeromine import journal as jr
from aeromine.engine import Engine

space = default_turbine_space()
cfg = RunConfig(space=space, positions=2, seed=9, budget=26,
                seeds_per_position=10)
workdir = Path(tempfile.mkdtemp())
path = workdir / "demo.journal"

with jr.JournalWriter(path, cfg) as writer:
    result = run(cfg, SyntheticOracle(space), writer)
print(f"run finished: {result.state.oracle_calls} calls,"
      f" best fitness {result.best_fitness:.4f}")

loaded = jr.load(path)
print(f"journal holds {len(loaded.records)} records,"
      f" sources {sorted({r.source for r in loaded.records})}")

# Simulate a crash after 22 evaluations: replay the prefix, then let the
# engine fall through to the live oracle for the rest.
prefix = loaded.records[:22]
resumed = Engine(cfg, oracle=SyntheticOracle(space), replay=prefix).run()
print(f"resumed from call 22: best fitness {resumed.best_fitness:.4f}")
assert resumed.best_fitness == result.best_fitness
assert resumed.best_configuration.genomes == result.best_configuration.genomes
print("resumed run matches the uninterrupted one exactly")

# The export table is handy for spreadsheets and plotting.
rows = jr.export_csv(path, workdir / "demo.csv")
print(f"exported {rows} rows to {workdir / 'demo.csv'}")
