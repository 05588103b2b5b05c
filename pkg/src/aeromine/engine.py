"""The design-mining loop with cooperative coevolution.

Each array position owns an archive of measured designs, a surrogate
refitted on that archive every round, a search population, and an elite
(its best measured design).  A round takes a snapshot of the elites, then
for every position: fit the surrogate, invert it with the EA to propose
candidates, measure the proposals composed with the snapshot elites, and
fold the results back into the archive.

The same loop runs three ways: live against an oracle (synthetic or
manual), as a baseline where EA offspring are measured directly instead of
surrogate-ranked, and in replay mode where journal records substitute for
oracle calls so any interrupted run can be rebuilt deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import optimizer as opt
from . import surrogate as sg
from .config import RunConfig
from .design_space import Genome, denormalize, normalize, random_genome
from .journal import EvaluationRecord, JournalWriter, record_from_measurement
from .oracle import ArrayConfiguration, Measurement
from .optimizer import Candidate
from .rng import RandomKey


class EngineError(RuntimeError):
    pass


class ReplayMismatch(EngineError):
    pass


class _ReplayExhausted(Exception):
    pass


@dataclass
class PositionState:
    archive: list[EvaluationRecord] = field(default_factory=list)
    population: list[Candidate] = field(default_factory=list)
    elite_genome: Genome | None = None
    elite_fitness: float = float("-inf")
    model: sg.SurrogateModel | None = None


@dataclass
class RunState:
    positions: list[PositionState]
    round_index: int = 0          # completed mining rounds
    oracle_calls: int = 0
    best_configuration: ArrayConfiguration | None = None
    best_fitness: float = float("-inf")
    status: str = "running"       # running | awaiting_measurement | finished | cancelled
    seeded: bool = False

    def elites(self) -> list[Genome]:
        return [p.elite_genome for p in self.positions]


@dataclass
class RunResult:
    best_configuration: ArrayConfiguration
    best_fitness: float
    state: RunState
    journal_path: str | None = None


class Engine:
    """Drives one run.  Pass `replay` records to substitute journal data for
    oracle calls; with an oracle also present, the run continues live once
    the replay is exhausted."""

    def __init__(self, config: RunConfig, oracle=None, writer: JournalWriter | None = None,
                 replay: list[EvaluationRecord] | None = None,
                 baseline: bool = False,
                 on_record: Callable[[EvaluationRecord], None] | None = None,
                 on_status: Callable[[str], None] | None = None):
        bad = config.validate()
        if bad:
            raise EngineError("invalid config: " + "; ".join(bad))
        self.config = config
        self.oracle = oracle
        self.writer = writer
        self.baseline = baseline
        self.on_record = on_record
        self.on_status = on_status
        self._replay = list(replay) if replay else []
        self._replay_idx = 0
        self.state = RunState(positions=[PositionState() for _ in range(config.positions)])
        self._root = RandomKey(config.seed)
        self._ivec_cache: dict[int, np.ndarray] = {}
        self.last_pending_ids: list[str] = []

    # -- randomness ---------------------------------------------------------

    def _key(self, purpose: str, position: int = 0, iteration: int = 0,
             counter: int = 0) -> RandomKey:
        return RandomKey(self.config.seed, position, iteration, purpose, counter)

    # -- composition --------------------------------------------------------

    @property
    def _spacing_norm(self) -> float:
        lo, hi = self.config.layout_bounds
        return (self.config.spacing - lo) / (hi - lo)

    def compose_array(self, position: int, genome: Genome,
                      elites: list[Genome]) -> ArrayConfiguration:
        genomes = list(elites)
        genomes[position] = genome
        if any(g is None for g in genomes):
            raise EngineError("missing elite for composition")
        return ArrayConfiguration(
            genomes=tuple(genomes),
            spacing=self.config.spacing,
            wind_speeds=self.config.wind_speeds,
        )

    def _input_vector(self, config_array: ArrayConfiguration) -> np.ndarray:
        parts = [normalize(g, self.config.space) for g in config_array.genomes]
        parts.append(np.array([self._spacing_norm]))
        return np.concatenate(parts)

    def _context_fn(self, position: int, elites: list[Genome]) -> Callable[[np.ndarray], np.ndarray]:
        space = self.config.space
        elite_vecs = [normalize(g, space) for g in elites]
        spacing = np.array([self._spacing_norm])

        def context(v: np.ndarray) -> np.ndarray:
            parts = list(elite_vecs)
            parts[position] = np.asarray(v, dtype=float)
            return np.concatenate(parts + [spacing])

        return context

    # -- evaluation / journaling -------------------------------------------

    def _set_status(self, status: str):
        self.state.status = status
        if self.on_status:
            self.on_status(status)

    def _evaluate(self, position: int, round_idx: int, source: str,
                  config_array: ArrayConfiguration) -> EvaluationRecord:
        rec_id = self.state.oracle_calls + 1
        if self._replay_idx < len(self._replay):
            rec = self._replay[self._replay_idx]
            self._replay_idx += 1
            self._verify_replay(rec, rec_id, position, round_idx, source, config_array)
        else:
            if self.oracle is None:
                raise _ReplayExhausted()
            noise_key = self._key("oracle-noise", counter=rec_id)
            manual = getattr(self.oracle, "provenance", "synthetic") == "manual"
            if manual:
                self._set_status("awaiting_measurement")
            try:
                measurement = self.oracle.evaluate(config_array, noise_key)
            finally:
                if manual and self.state.status == "awaiting_measurement":
                    self._set_status("running")
            rec = record_from_measurement(
                rec_id, round_idx, position, source, config_array, measurement,
                pending_id=getattr(self.oracle, "last_pending_id", None))
            if self.writer is not None:
                self.writer.append(rec)
        self.state.oracle_calls += 1
        self._absorb(rec)
        if self.on_record:
            self.on_record(rec)
        return rec

    def _verify_replay(self, rec: EvaluationRecord, rec_id: int, position: int,
                       round_idx: int, source: str, config_array: ArrayConfiguration):
        if rec.record_id != rec_id or rec.position != position or rec.round != round_idx:
            raise ReplayMismatch(
                f"journal record {rec.record_id} (round {rec.round}, position "
                f"{rec.position}) does not match replayed proposal "
                f"{rec_id} (round {round_idx}, position {position})")
        if rec.source != source:
            raise ReplayMismatch(f"record {rec.record_id}: source {rec.source!r} != {source!r}")
        same = (rec.configuration.genomes == config_array.genomes
                and rec.configuration.spacing == config_array.spacing
                and rec.configuration.wind_speeds == config_array.wind_speeds)
        if not same:
            raise ReplayMismatch(f"record {rec.record_id}: configuration mismatch")

    def _absorb(self, rec: EvaluationRecord):
        ps = self.state.positions[rec.position]
        ps.archive.append(rec)
        if rec.fitness > ps.elite_fitness:
            ps.elite_fitness = rec.fitness
            ps.elite_genome = rec.configuration.genomes[rec.position]
        if rec.fitness > self.state.best_fitness:
            self.state.best_fitness = rec.fitness
            self.state.best_configuration = rec.configuration

    def _remaining(self) -> int:
        return self.config.budget - self.state.oracle_calls

    # -- seeding ------------------------------------------------------------

    def seed_archives(self):
        cfg = self.config
        for p in range(cfg.positions):
            supplied = cfg.seed_designs[p] if p < len(cfg.seed_designs) else ()
            for s in range(cfg.seeds_per_position):
                if self._remaining() <= 0:
                    raise EngineError("budget exhausted during seeding")
                if s < len(supplied):
                    genome, source = supplied[s], "seed-human"
                else:
                    genome = random_genome(cfg.space, self._key("seed-genome", p, 0, s))
                    source = "seed-random"
                genomes = []
                for q in range(cfg.positions):
                    if q == p:
                        genomes.append(genome)
                    else:
                        genomes.append(random_genome(
                            cfg.space, self._key(f"seed-peer-{q}", p, 0, s)))
                config_array = ArrayConfiguration(
                    tuple(genomes), cfg.spacing, cfg.wind_speeds)
                self._evaluate(p, 0, source, config_array)
        for p, ps in enumerate(self.state.positions):
            ps.population = [
                Candidate(normalize(r.configuration.genomes[p], cfg.space),
                          measured=r.fitness)
                for r in ps.archive
            ]
        self.state.seeded = True

    # -- mining -------------------------------------------------------------

    def _training_data(self, position: int) -> sg.Dataset:
        archive = self.state.positions[position].archive
        rows = []
        for r in archive:
            vec = self._ivec_cache.get(r.record_id)
            if vec is None:
                vec = self._input_vector(r.configuration)
                self._ivec_cache[r.record_id] = vec
            rows.append(vec)
        y = np.array([r.fitness for r in archive])
        return sg.Dataset(np.stack(rows), y)

    def mining_iteration(self, position: int, round_idx: int, elites: list[Genome]):
        cfg = self.config
        ps = self.state.positions[position]

        data = self._training_data(position)
        ps.model = sg.fit(data, cfg.fit_hyper, self._key("fit", position, round_idx))

        context = self._context_fn(position, elites)
        ranked = opt.evolve_on_model(
            ps.model, context, cfg.ea, cfg.space,
            self._key("evolve", position, round_idx),
            init_population=[c.vector for c in ps.population],
        )
        ps.population = ranked

        archive_vecs = [normalize(r.configuration.genomes[position], cfg.space)
                        for r in ps.archive]
        chosen: list[tuple[np.ndarray, str]] = []
        k = cfg.proposals_per_iteration
        for cand in ranked:
            snapped = normalize(denormalize(cand.vector, cfg.space), cfg.space)
            if opt.novelty_filter(snapped, archive_vecs + [c[0] for c in chosen],
                                  cfg.ea.novelty_eps):
                chosen.append((snapped, "surrogate"))
                if len(chosen) == k:
                    break
        while len(chosen) < k:
            # every ranked candidate duplicates the archive: mutate the leader
            fallback = opt.mutate(
                ranked[0].vector, cfg.ea, cfg.space,
                self._key("fallback", position, round_idx, counter=len(chosen)))
            snapped = normalize(denormalize(fallback, cfg.space), cfg.space)
            chosen.append((snapped, "fallback-mutation"))

        for vec, source in chosen:
            if self._remaining() <= 0:
                break
            genome = denormalize(vec, cfg.space)
            config_array = self.compose_array(position, genome, elites)
            self._evaluate(position, round_idx, source, config_array)

    def _baseline_iteration(self, position: int, round_idx: int, elites: list[Genome]):
        cfg = self.config
        ps = self.state.positions[position]
        rng = self._key("baseline", position, round_idx).generator()
        pop = ps.population
        key = lambda c: c.measured

        elite = pop[max(range(len(pop)), key=lambda i: (pop[i].measured, -i))]
        new = [elite]
        while len(new) < cfg.ea.population_size:
            if self._remaining() <= 0:
                break
            p1 = opt.tournament_select(pop, cfg.ea.tournament_k, key, rng)
            p2 = opt.tournament_select(pop, cfg.ea.tournament_k, key, rng)
            child = opt.mutate(opt.crossover(p1.vector, p2.vector, cfg.ea, rng),
                               cfg.ea, cfg.space, rng)
            genome = denormalize(child, cfg.space)
            config_array = self.compose_array(position, genome, elites)
            rec = self._evaluate(position, round_idx, "baseline", config_array)
            new.append(Candidate(normalize(genome, cfg.space), measured=rec.fitness))
        ps.population = new

    def _round(self):
        round_idx = self.state.round_index + 1
        elites = list(self.state.elites())
        for p in range(self.config.positions):
            if self._remaining() <= 0:
                break
            if self.baseline:
                self._baseline_iteration(p, round_idx, elites)
            else:
                self.mining_iteration(p, round_idx, elites)
        self.state.round_index = round_idx

    # -- top level ----------------------------------------------------------

    def run(self, stop_on_replay_exhausted: bool = False) -> RunResult:
        try:
            if not self.state.seeded:
                self.seed_archives()
            while self._remaining() > 0 and self.state.status == "running":
                self._round()
            if self.state.status == "running":
                self._set_status("finished")
        except _ReplayExhausted:
            if not stop_on_replay_exhausted:
                raise EngineError("journal replay exhausted with no live oracle")
        return RunResult(
            best_configuration=self.state.best_configuration,
            best_fitness=self.state.best_fitness,
            state=self.state,
            journal_path=self.writer.path if self.writer else None,
        )

    def cancel(self):
        self._set_status("cancelled")


def run(config: RunConfig, oracle, writer: JournalWriter | None = None, **kw) -> RunResult:
    """Surrogate-assisted design-mining run."""
    return Engine(config, oracle=oracle, writer=writer, **kw).run()


def baseline_run(config: RunConfig, oracle, writer: JournalWriter | None = None, **kw) -> RunResult:
    """Same coevolutionary loop, every offspring measured directly (no surrogate)."""
    return Engine(config, oracle=oracle, writer=writer, baseline=True, **kw).run()
