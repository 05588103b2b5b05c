"""Evaluation backends.

Three ways to score an array configuration:

* a synthetic interacting-array power function, the desk-scale stand-in for
  a wind tunnel.  It is built to show the two behaviours seen on real rigs:
  counter-rotating neighbours outperform co-rotating ones, and a well-spaced
  pair yields more power than the sum of its members alone;
* a manual queue, where a human fabricates the proposed array, measures it,
  and submits dynamo readings;
* a brute-force grid search over the whole design space, used as the
  independent reference in tests and benchmarks.
"""

from __future__ import annotations

import itertools
import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .design_space import DesignSpace, Genome, normalize, validate_genome
from .rng import RandomKey, as_generator


class OracleError(ValueError):
    pass


class QueueClosedError(OracleError):
    pass


class UnknownPendingError(OracleError):
    pass


class AlreadySubmittedError(OracleError):
    pass


@dataclass(frozen=True)
class ArrayConfiguration:
    """N turbines in line order, their shared spacing, and the test speeds."""
    genomes: tuple[Genome, ...]
    spacing: float
    wind_speeds: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "genomes", tuple(self.genomes))
        object.__setattr__(self, "wind_speeds", tuple(float(v) for v in self.wind_speeds))
        if len(self.genomes) < 1:
            raise OracleError("array needs at least one turbine")
        if not self.wind_speeds or any(v <= 0 for v in self.wind_speeds):
            raise OracleError("wind speeds must be nonempty and positive")

    @property
    def n_positions(self) -> int:
        return len(self.genomes)


@dataclass(frozen=True)
class OracleConstants:
    sigma_ref: float = 1.2   # solidity normalizer
    s_star: float = 0.6      # shape optimum
    kappa: float = 0.5       # interaction strength
    beta: float = 0.4        # co-rotation penalty factor
    d_star: float = 0.75     # optimal spacing, rotor diameters
    w: float = 0.5           # interaction width
    p_ref: float = 1.0       # power scale, W*s^3/m^3
    noise_eta: float = 0.0   # relative noise std

    def __post_init__(self):
        for name in ("sigma_ref", "s_star", "kappa", "beta", "d_star", "w", "p_ref"):
            if getattr(self, name) <= 0:
                raise OracleError(f"{name} must be positive")
        if self.noise_eta < 0:
            raise OracleError("noise_eta must be >= 0")
        if not 0 <= self.beta <= 1:
            raise OracleError("beta must be in [0, 1]")


@dataclass(frozen=True)
class Measurement:
    readings: np.ndarray         # (n_speeds, n_positions), watts
    fitness: float
    provenance: str              # "synthetic" | "manual"
    timestamp: float


@dataclass
class PendingEvaluation:
    pending_id: str
    configuration: ArrayConfiguration
    issued_at: float
    status: str = "awaiting"     # awaiting -> submitted | cancelled


def aggregate_fitness(readings: np.ndarray) -> float:
    """Mean over wind speeds of the per-speed total power across positions."""
    readings = np.asarray(readings, dtype=float)
    if readings.size == 0:
        raise OracleError("empty readings matrix")
    return float(np.mean(np.sum(readings, axis=1)))


def _constants_for(constants, i: int) -> OracleConstants:
    if isinstance(constants, OracleConstants):
        return constants
    return constants[i]


def turbine_efficiency(genome: Genome, space: DesignSpace, constants: OracleConstants) -> float:
    """Standalone efficiency q of one turbine: solidity response times shape response."""
    blades = genome[space.index("blades")]
    chord = genome[space.index("chord")]
    shape = genome[space.index("shape")]
    sigma = blades * chord / constants.sigma_ref
    g = sigma * math.exp(1.0 - sigma)
    h = max(0.0, 1.0 - 4.0 * (shape - constants.s_star) ** 2)
    return g * h


def _interaction(q_left: float, q_right: float, rot_left, rot_right,
                 spacing: float, c: OracleConstants) -> float:
    rho = 1.0 if rot_left != rot_right else -c.beta
    envelope = math.exp(-(((spacing - c.d_star) / c.w) ** 2))
    return c.kappa * envelope * rho * math.sqrt(q_left * q_right)


def synthetic_evaluate(config: ArrayConfiguration, space: DesignSpace,
                       constants, stream: RandomKey | None = None) -> Measurement:
    """Score an array with the synthetic power function.

    Per-turbine readings carry each turbine's standalone power plus half of
    every interaction term it takes part in, so readings sum to the array
    total exactly.  When the constants are a per-position list, standalone
    terms use each position's constants; pair terms and the power scale use
    the first position's.
    """
    n = config.n_positions
    for i, g in enumerate(config.genomes):
        bad = validate_genome(g, space)
        if bad:
            raise OracleError(f"position {i + 1}: " + "; ".join(bad))
    c0 = _constants_for(constants, 0)
    rot_idx = space.index("rotation")

    q = np.array([
        turbine_efficiency(g, space, _constants_for(constants, i))
        for i, g in enumerate(config.genomes)
    ])
    pair_terms = np.array([
        _interaction(q[i], q[i + 1],
                     config.genomes[i][rot_idx], config.genomes[i + 1][rot_idx],
                     config.spacing, c0)
        for i in range(n - 1)
    ])

    share = q.copy()
    for i, t in enumerate(pair_terms):
        share[i] += 0.5 * t
        share[i + 1] += 0.5 * t

    speeds = np.asarray(config.wind_speeds)
    readings = c0.p_ref * np.power(speeds, 3)[:, None] * share[None, :]

    eta = c0.noise_eta
    if eta > 0:
        if stream is None:
            raise OracleError("noise requested but no random stream given")
        rng = as_generator(stream)
        readings = readings * (1.0 + rng.normal(0.0, eta, size=readings.shape))

    return Measurement(
        readings=readings,
        fitness=aggregate_fitness(readings),
        provenance="synthetic",
        timestamp=time.time(),
    )


class SyntheticOracle:
    """Oracle adapter around synthetic_evaluate; counts calls for benchmarks."""

    provenance = "synthetic"

    def __init__(self, space: DesignSpace, constants=OracleConstants()):
        self.space = space
        self.constants = constants
        self.calls = 0

    def evaluate(self, config: ArrayConfiguration, stream: RandomKey) -> Measurement:
        self.calls += 1
        return synthetic_evaluate(config, self.space, self.constants, stream)


class ManualQueue:
    """Serialized pending-evaluation queue for human-in-the-loop measurement.

    propose() registers a configuration awaiting fabrication; submit()
    attaches the measured readings and wakes anyone blocked in wait().
    """

    def __init__(self):
        self._lock = threading.Condition()
        self._pending: dict[str, PendingEvaluation] = {}
        self._results: dict[str, Measurement] = {}
        self._next = 1
        self._closed = False
        self.on_propose = None   # optional callback(PendingEvaluation)

    def propose(self, config: ArrayConfiguration) -> str:
        with self._lock:
            if self._closed:
                raise QueueClosedError("queue closed")
            pid = f"p{self._next}"
            self._next += 1
            pend = PendingEvaluation(pid, config, time.time())
            self._pending[pid] = pend
            self._lock.notify_all()
        if self.on_propose is not None:
            self.on_propose(pend)
        return pid

    def submit(self, pending_id: str, readings) -> Measurement:
        readings = np.asarray(readings, dtype=float)
        with self._lock:
            pend = self._pending.get(pending_id)
            if pend is None:
                raise UnknownPendingError(f"unknown id {pending_id!r}")
            if pend.status != "awaiting":
                raise AlreadySubmittedError(f"{pending_id} already {pend.status}")
            expected = (len(pend.configuration.wind_speeds), pend.configuration.n_positions)
            if readings.shape != expected:
                raise OracleError(
                    f"readings shape {readings.shape} != expected {expected}")
            if not np.all(np.isfinite(readings)):
                raise OracleError("readings must be finite")
            pend.status = "submitted"
            m = Measurement(
                readings=readings,
                fitness=aggregate_fitness(readings),
                provenance="manual",
                timestamp=time.time(),
            )
            self._results[pending_id] = m
            self._lock.notify_all()
            return m

    def wait(self, pending_id: str, timeout: float | None = None) -> Measurement:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._lock:
            while pending_id not in self._results:
                pend = self._pending.get(pending_id)
                if pend is None:
                    raise UnknownPendingError(f"unknown id {pending_id!r}")
                if pend.status == "cancelled" or self._closed:
                    raise QueueClosedError("queue closed")
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    raise TimeoutError(f"no measurement for {pending_id}")
                self._lock.wait(remaining)
            return self._results[pending_id]

    def awaiting(self) -> list[PendingEvaluation]:
        with self._lock:
            return [p for p in self._pending.values() if p.status == "awaiting"]

    def get(self, pending_id: str) -> PendingEvaluation | None:
        with self._lock:
            return self._pending.get(pending_id)

    def close(self):
        with self._lock:
            self._closed = True
            for p in self._pending.values():
                if p.status == "awaiting":
                    p.status = "cancelled"
            self._lock.notify_all()


class ManualOracle:
    """Oracle adapter that routes every evaluation through a ManualQueue."""

    provenance = "manual"

    def __init__(self, queue: ManualQueue | None = None, timeout: float | None = None):
        self.queue = queue if queue is not None else ManualQueue()
        self.timeout = timeout
        self.last_pending_id: str | None = None

    def evaluate(self, config: ArrayConfiguration, stream: RandomKey) -> Measurement:
        pid = self.queue.propose(config)
        self.last_pending_id = pid
        return self.queue.wait(pid, timeout=self.timeout)


def _parameter_grid(space: DesignSpace, resolution: int) -> list[list]:
    grids = []
    for p in space.parameters:
        if p.kind == "categorical":
            grids.append(list(p.levels))
        elif p.kind == "integer":
            grids.append(list(range(int(p.lower), int(p.upper) + 1)))
        else:
            grids.append([float(v) for v in np.linspace(p.lower, p.upper, resolution)])
    return grids


def brute_force_optimum(space: DesignSpace, layout_bounds: tuple[float, float],
                        constants, resolution: int,
                        n_positions: int = 1,
                        wind_speeds: tuple[float, ...] = (1.0,),
                        cap: int = 10 ** 7) -> tuple[ArrayConfiguration, float]:
    """Exhaustive noise-free grid search; the reference optimizer.

    Continuous dimensions (and, for multi-turbine arrays, the spacing) are
    discretized uniformly with `resolution` points including the endpoints;
    integers and categoricals are enumerated.  Ties go to the configuration
    with the lexicographically smallest normalized vector.
    """
    grids = _parameter_grid(space, resolution)
    genomes = [Genome(tuple(vals)) for vals in itertools.product(*grids)]
    n_genomes = len(genomes)
    if n_positions > 1:
        spacings = [float(s) for s in np.linspace(*layout_bounds, resolution)]
    else:
        spacings = [float(layout_bounds[0])]
    total = (n_genomes ** n_positions) * len(spacings)
    if total > cap:
        raise OracleError(f"grid size {total} exceeds cap {cap}")

    lo, hi = layout_bounds
    q = np.array([turbine_efficiency(g, space, _constants_for(constants, 0)) for g in genomes])
    if not isinstance(constants, OracleConstants):
        q_per_pos = [
            np.array([turbine_efficiency(g, space, _constants_for(constants, i)) for g in genomes])
            for i in range(n_positions)
        ]
    else:
        q_per_pos = [q] * n_positions
    rot_idx = space.index("rotation")
    rots = [g[rot_idx] for g in genomes]
    c0 = _constants_for(constants, 0)
    v3 = float(np.mean(np.power(wind_speeds, 3))) * c0.p_ref
    norm_vecs = [normalize(g, space) for g in genomes]

    def tie_key(idxs, spacing_norm):
        return tuple(np.concatenate([norm_vecs[j] for j in idxs] + [[spacing_norm]]))

    best_fit = -math.inf
    best = None       # (idxs, spacing)
    best_key = None
    for spacing in spacings:
        spacing_norm = (spacing - lo) / (hi - lo) if hi > lo else 0.0
        for idxs in itertools.product(range(n_genomes), repeat=n_positions):
            total_q = sum(q_per_pos[i][j] for i, j in enumerate(idxs))
            inter = 0.0
            for i in range(n_positions - 1):
                inter += _interaction(
                    q_per_pos[i][idxs[i]], q_per_pos[i + 1][idxs[i + 1]],
                    rots[idxs[i]], rots[idxs[i + 1]], spacing, c0)
            fit = v3 * (total_q + inter)
            if fit > best_fit:
                best_fit = fit
                best = (idxs, spacing)
                best_key = tie_key(idxs, spacing_norm)
            elif fit == best_fit:
                key = tie_key(idxs, spacing_norm)
                if key < best_key:
                    best = (idxs, spacing)
                    best_key = key

    idxs, spacing = best
    config = ArrayConfiguration(
        genomes=tuple(genomes[j] for j in idxs),
        spacing=spacing,
        wind_speeds=tuple(wind_speeds),
    )
    return config, best_fit
