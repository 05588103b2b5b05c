import dataclasses

import numpy as np
import pytest

from aeromine import (ArrayConfiguration, Genome, OracleConstants, RunConfig,
                      SyntheticOracle, baseline_run, normalize, run)
from aeromine.engine import Engine, EngineError
from aeromine.optimizer import EAParams


def make_config(space, **kw):
    defaults = dict(space=space, positions=1, seed=1, budget=30)
    defaults.update(kw)
    return RunConfig(**defaults)


def fresh(space, **kw):
    cfg = make_config(space, **kw)
    return cfg, Engine(cfg, oracle=SyntheticOracle(space, cfg.constants))


class TestSeeding:
    def test_archive_size_and_accounting(self, space):
        cfg, eng = fresh(space, budget=10, seeds_per_position=10)
        eng.seed_archives()
        assert len(eng.state.positions[0].archive) == 10
        assert eng.state.oracle_calls == 10

    def test_user_seeds_fill_rule(self, space):
        named = tuple(Genome((b, 0.3, 0.6, "CW")) for b in (2, 3, 4))
        cfg, _ = fresh(space)
        cfg = dataclasses.replace(cfg, seed_designs=(named,))
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        eng.seed_archives()
        sources = [r.source for r in eng.state.positions[0].archive]
        assert sources[:3] == ["seed-human"] * 3
        assert sources[3:] == ["seed-random"] * 7
        archived = [r.configuration.genomes[0] for r in eng.state.positions[0].archive[:3]]
        assert tuple(archived) == named

    def test_deterministic(self, space):
        _, a = fresh(space, seed=9)
        _, b = fresh(space, seed=9)
        a.seed_archives()
        b.seed_archives()
        for ra, rb in zip(a.state.positions[0].archive, b.state.positions[0].archive):
            assert ra.configuration.genomes == rb.configuration.genomes
            assert ra.fitness == rb.fitness


class TestComposeArray:
    def test_single_position(self, space, optimal_genome):
        _, eng = fresh(space)
        arr = eng.compose_array(0, optimal_genome, [None])
        assert arr.genomes == (optimal_genome,)

    def test_substitution_in_context(self, space, optimal_genome):
        cfg, _ = fresh(space, positions=3, budget=30)
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        elites = [Genome((2, 0.1, 0.1, "CW")), Genome((3, 0.2, 0.2, "CW")),
                  Genome((4, 0.3, 0.3, "CW"))]
        arr = eng.compose_array(1, optimal_genome, elites)
        assert arr.genomes == (elites[0], optimal_genome, elites[2])

    def test_elite_fixed_point(self, space):
        cfg, eng = fresh(space, positions=2, budget=20)
        eng.seed_archives()
        elites = eng.state.elites()
        arr = eng.compose_array(0, elites[0], elites)
        assert arr.genomes == tuple(elites)

    def test_missing_elite_rejected(self, space, optimal_genome):
        cfg, _ = fresh(space, positions=2, budget=20)
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        with pytest.raises(EngineError):
            eng.compose_array(0, optimal_genome, [optimal_genome, None])


class TestRun:
    def test_degenerate_budget_returns_best_seed(self, space):
        cfg = make_config(space, budget=10, seeds_per_position=10)
        result = run(cfg, SyntheticOracle(space))
        assert result.state.oracle_calls == 10
        assert result.state.round_index == 0
        assert result.best_fitness == max(
            r.fitness for r in result.state.positions[0].archive)

    def test_budget_accounting_exact(self, space):
        oracle = SyntheticOracle(space)
        result = run(make_config(space, budget=25), oracle)
        assert result.state.oracle_calls == 25
        assert oracle.calls == 25
        assert result.state.status == "finished"

    def test_rerun_identical(self, space):
        a = run(make_config(space, seed=3, budget=20), SyntheticOracle(space))
        b = run(make_config(space, seed=3, budget=20), SyntheticOracle(space))
        assert a.best_fitness == b.best_fitness
        assert a.best_configuration.genomes == b.best_configuration.genomes

    def test_best_monotone_in_oracle_calls(self, space):
        history = []
        cfg = make_config(space, budget=40, seed=5)
        eng = Engine(cfg, oracle=SyntheticOracle(space),
                     on_record=lambda r: history.append(r.fitness))
        eng.run()
        running = np.maximum.accumulate(history)
        assert np.array_equal(running, sorted(running))

    def test_elite_updates_strictly(self, space):
        cfg = make_config(space, budget=30, seed=2)
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        eng.run()
        ps = eng.state.positions[0]
        assert ps.elite_fitness == max(r.fitness for r in ps.archive)

    def test_fallback_when_everything_duplicates(self, space):
        # a huge novelty radius rejects every ranked candidate
        cfg = make_config(space, budget=13, seed=4,
                          ea=EAParams(novelty_eps=10.0, generations_on_model=5))
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        eng.run()
        sources = {r.source for p in eng.state.positions for r in p.archive}
        assert "fallback-mutation" in sources
        assert "surrogate" not in sources

    def test_mining_proposals_are_novel(self, space):
        cfg = make_config(space, budget=25, seed=6)
        eng = Engine(cfg, oracle=SyntheticOracle(space))
        eng.run()
        vecs = [normalize(r.configuration.genomes[0], space)
                for r in eng.state.positions[0].archive]
        for i, v in enumerate(vecs):
            for w in vecs[:i]:
                assert float(np.linalg.norm(v - w)) >= cfg.ea.novelty_eps


class TestStaleEliteSnapshot:
    def test_position_order_commutes_within_round(self, space):
        # proposals in a round depend only on the round-start snapshot
        def proposals(order):
            cfg = make_config(space, positions=2, budget=22, seed=8)
            eng = Engine(cfg, oracle=SyntheticOracle(space))
            eng.seed_archives()
            elites = list(eng.state.elites())
            for p in order:
                eng.mining_iteration(p, 1, elites)
            return {
                (r.round, r.position, r.configuration.genomes)
                for ps in eng.state.positions for r in ps.archive if r.round == 1
            }

        assert proposals([0, 1]) == proposals([1, 0])


class TestBaseline:
    def test_degenerate_budget(self, space):
        result = baseline_run(make_config(space, budget=10), SyntheticOracle(space))
        assert result.state.round_index == 0
        assert result.state.oracle_calls == 10

    def test_deterministic(self, space):
        a = baseline_run(make_config(space, seed=11, budget=48), SyntheticOracle(space))
        b = baseline_run(make_config(space, seed=11, budget=48), SyntheticOracle(space))
        assert a.best_fitness == b.best_fitness

    def test_journals_baseline_source(self, space):
        records = []
        cfg = make_config(space, budget=30, seed=12)
        eng = Engine(cfg, oracle=SyntheticOracle(space), baseline=True,
                     on_record=records.append)
        eng.run()
        assert {r.source for r in records if r.round > 0} == {"baseline"}
        assert eng.state.oracle_calls == 30


class TestHeterogeneity:
    def test_asymmetric_constants_give_distinct_elites(self, space):
        constants = [OracleConstants(s_star=s) for s in (0.2, 0.5, 0.8)]
        cfg = RunConfig(space=space, positions=3, seed=13, budget=60,
                        seeds_per_position=5, constants=constants)
        result = run(cfg, SyntheticOracle(space, constants))
        shapes = [p.elite_genome[space.index("shape")] for p in result.state.positions]
        assert len({round(s, 2) for s in shapes}) > 1
