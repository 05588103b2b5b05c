"""Real-coded evolutionary search in normalized [0,1]^d space.

The same generational loop serves two roles: inverting a fitted surrogate
(scoring candidates by model prediction, no oracle calls) and the baseline
configuration where every candidate is scored by direct measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import surrogate as sg
from .design_space import DesignSpace
from .rng import RandomKey, as_generator


class OptimizerError(ValueError):
    pass


@dataclass(frozen=True)
class EAParams:
    population_size: int = 20
    tournament_k: int = 3
    crossover_prob: float = 0.8
    mutation_sigma: float = 0.1
    mutation_prob: float | None = None     # None means 1/dimension
    generations_on_model: int = 50
    novelty_eps: float = 1e-3

    def __post_init__(self):
        if self.population_size < 2:
            raise OptimizerError("population_size must be >= 2")
        if not 1 <= self.tournament_k <= self.population_size:
            raise OptimizerError("tournament_k out of range")
        for p in (self.crossover_prob, self.mutation_prob):
            if p is not None and not 0 <= p <= 1:
                raise OptimizerError("probabilities must lie in [0, 1]")

    def mutation_rate(self, dim: int) -> float:
        return self.mutation_prob if self.mutation_prob is not None else 1.0 / dim


@dataclass(eq=False)
class Candidate:
    vector: np.ndarray
    predicted: float | None = None
    measured: float | None = None


def mutate(v: np.ndarray, params: EAParams, space: DesignSpace, stream) -> np.ndarray:
    """Per-coordinate Gaussian perturbation clamped to [0,1]; categorical
    coordinates resample a uniform level instead."""
    rng = as_generator(stream)
    rate = params.mutation_rate(len(space))
    out = np.array(v, dtype=float)
    for i, p in enumerate(space.parameters):
        if rng.random() >= rate:
            continue
        if p.kind == "categorical":
            n_levels = len(p.levels)
            out[i] = rng.integers(0, n_levels) / (n_levels - 1)
        else:
            out[i] = min(1.0, max(0.0, out[i] + rng.normal(0.0, params.mutation_sigma)))
    return out


def crossover(a: np.ndarray, b: np.ndarray, params: EAParams, stream) -> np.ndarray:
    """Uniform crossover with probability crossover_prob, else a copy of a."""
    if a.shape != b.shape:
        raise OptimizerError("parent dimension mismatch")
    rng = as_generator(stream)
    if rng.random() >= params.crossover_prob:
        return np.array(a, dtype=float)
    mask = rng.random(a.shape[0]) < 0.5
    return np.where(mask, a, b).astype(float)


def tournament_select(pop: list[Candidate], k: int, key_fn: Callable[[Candidate], float],
                      stream) -> Candidate:
    """k uniform draws with replacement; best key wins, ties to the lowest index."""
    if not pop:
        raise OptimizerError("empty population")
    rng = as_generator(stream)
    n = len(pop)
    best = None
    best_rank = None
    for _ in range(k):
        i = int(rng.random() * n)
        key = key_fn(pop[i])
        if key is None:
            raise OptimizerError("candidate missing selection key")
        rank = (key, -i)
        if best is None or rank > best_rank:
            best, best_rank = pop[i], rank
    return best


def novelty_filter(vector: np.ndarray, archive_vectors, eps: float) -> bool:
    """True (accept) unless some archived design lies strictly within eps."""
    for a in archive_vectors:
        if float(np.linalg.norm(vector - np.asarray(a))) < eps:
            return False
    return True


def evolve_with_score(score_fn: Callable[[list[np.ndarray]], np.ndarray], params: EAParams,
                      space: DesignSpace, stream: RandomKey,
                      init_population: list[np.ndarray] | None = None,
                      generations: int | None = None) -> list[Candidate]:
    """Generational EA with elitism of 1; returns the final population
    ranked by score descending.  score_fn takes a list of vectors and is
    the only evaluation path.
    """
    rng = as_generator(stream)
    dim = len(space)
    n = params.population_size
    gens = params.generations_on_model if generations is None else generations

    n_immigrants = max(1, round(0.2 * n)) if init_population else n
    vectors: list[np.ndarray] = []
    if init_population:
        vectors.extend(np.array(v, dtype=float) for v in init_population[: n - n_immigrants])
    while len(vectors) < n:
        vectors.append(rng.random(dim))

    scores = np.asarray(score_fn(vectors), dtype=float)
    pop = [Candidate(v, predicted=float(s)) for v, s in zip(vectors, scores)]
    key = lambda c: c.predicted

    for _ in range(gens):
        elite = pop[max(range(n), key=lambda i: (pop[i].predicted, -i))]
        children = []
        for _ in range(n - 1):
            p1 = tournament_select(pop, params.tournament_k, key, rng)
            p2 = tournament_select(pop, params.tournament_k, key, rng)
            child = crossover(p1.vector, p2.vector, params, rng)
            children.append(mutate(child, params, space, rng))
        child_scores = np.asarray(score_fn(children), dtype=float)
        pop = [elite] + [Candidate(v, predicted=float(s))
                         for v, s in zip(children, child_scores)]

    order = sorted(range(len(pop)), key=lambda i: (-pop[i].predicted, i))
    return [pop[i] for i in order]


def evolve_on_model(model: sg.SurrogateModel, context: Callable[[np.ndarray], np.ndarray],
                    params: EAParams, space: DesignSpace, stream: RandomKey,
                    init_population: list[np.ndarray] | None = None) -> list[Candidate]:
    """Invert a fitted surrogate: maximize predicted fitness of the candidate
    composed into its array context.  Makes zero oracle calls."""

    def score_batch(vectors: list[np.ndarray]) -> np.ndarray:
        X = np.stack([context(v) for v in vectors])
        return sg.predict_batch(model, X)

    return evolve_with_score(score_batch, params, space, stream,
                             init_population=init_population)
