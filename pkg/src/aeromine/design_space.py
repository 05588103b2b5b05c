"""Turbine design parameterization.

A design space is an ordered list of named parameters (continuous, integer
or categorical).  Genomes hold raw parameter values; the optimizer and the
surrogate work on unit-interval vectors produced by :func:`normalize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import as_generator

KINDS = ("continuous", "integer", "categorical")


class DesignSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    kind: str
    lower: float | None = None
    upper: float | None = None
    levels: tuple[str, ...] | None = None
    units: str = ""

    def violations(self) -> list[str]:
        out = []
        if not self.name:
            out.append("empty parameter name")
        if self.kind not in KINDS:
            out.append(f"{self.name}: unknown kind {self.kind!r}")
            return out
        if self.kind == "categorical":
            if self.levels is None or len(self.levels) < 2:
                out.append(f"{self.name}: categorical needs >= 2 levels")
            elif len(set(self.levels)) != len(self.levels):
                out.append(f"{self.name}: duplicate levels")
        else:
            if self.lower is None or self.upper is None:
                out.append(f"{self.name}: missing bounds")
            elif not self.lower < self.upper:
                out.append(f"{self.name}: empty range [{self.lower}, {self.upper}]")
        return out


@dataclass(frozen=True)
class DesignSpace:
    parameters: tuple[ParameterSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))

    def __len__(self) -> int:
        return len(self.parameters)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class Genome:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)


def validate_space(space: DesignSpace) -> list[str]:
    """Empty list means the space is well formed."""
    out: list[str] = []
    if len(space) == 0:
        return ["design space has no parameters"]
    seen: set[str] = set()
    for p in space.parameters:
        if p.name in seen:
            out.append(f"duplicate name {p.name!r}")
        seen.add(p.name)
        out.extend(p.violations())
    return out


def validate_genome(genome: Genome, space: DesignSpace) -> list[str]:
    if len(genome) != len(space):
        return [f"genome length {len(genome)} != space length {len(space)}"]
    out = []
    for v, p in zip(genome.values, space.parameters):
        if p.kind == "categorical":
            if v not in p.levels:
                out.append(f"{p.name}: {v!r} not in levels")
        else:
            if not (p.lower <= v <= p.upper):
                out.append(f"{p.name}: {v} outside [{p.lower}, {p.upper}]")
            elif p.kind == "integer" and v != int(v):
                out.append(f"{p.name}: {v} not integral")
    return out


def normalize(genome: Genome, space: DesignSpace) -> np.ndarray:
    """Map raw values to [0, 1]^d coordinates, one per parameter."""
    bad = validate_genome(genome, space)
    if bad:
        raise DesignSpaceError("; ".join(bad))
    coords = np.empty(len(space))
    for i, (v, p) in enumerate(zip(genome.values, space.parameters)):
        if p.kind == "categorical":
            coords[i] = p.levels.index(v) / (len(p.levels) - 1)
        else:
            coords[i] = (v - p.lower) / (p.upper - p.lower)
    return coords


def denormalize(coords: np.ndarray, space: DesignSpace) -> Genome:
    """Inverse of normalize; integers round to nearest (ties toward upper),
    categoricals snap to the nearest level index."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (len(space),):
        raise DesignSpaceError(f"vector length {coords.shape} != space length {len(space)}")
    if np.any(coords < 0.0) or np.any(coords > 1.0):
        raise DesignSpaceError("coordinate outside [0, 1]")
    values = []
    for x, p in zip(coords, space.parameters):
        if p.kind == "categorical":
            idx = math.floor(x * (len(p.levels) - 1) + 0.5)
            values.append(p.levels[idx])
        else:
            raw = p.lower + x * (p.upper - p.lower)
            if p.kind == "integer":
                values.append(int(math.floor(raw + 0.5)))
            else:
                values.append(float(raw))
    return Genome(tuple(values))


def random_genome(space: DesignSpace, stream) -> Genome:
    """Uniform draw over every parameter's range/levels; deterministic per stream."""
    bad = validate_space(space)
    if bad:
        raise DesignSpaceError("; ".join(bad))
    rng = as_generator(stream)
    values = []
    for p in space.parameters:
        if p.kind == "categorical":
            values.append(p.levels[int(rng.integers(0, len(p.levels)))])
        elif p.kind == "integer":
            values.append(int(rng.integers(int(p.lower), int(p.upper) + 1)))
        else:
            values.append(float(rng.uniform(p.lower, p.upper)))
    return Genome(tuple(values))


def default_turbine_space() -> DesignSpace:
    """Default single-turbine space: blade count, chord, blade shape, rotation sense.

    The chord upper bound is chosen so the solidity optimum (4 blades at
    chord 0.3) sits exactly on odd-resolution reference grids.
    """
    return DesignSpace((
        ParameterSpec("blades", "integer", 2, 6, units="count"),
        ParameterSpec("chord", "continuous", 0.05, 0.55, units="m"),
        ParameterSpec("shape", "continuous", 0.0, 1.0, units="dimensionless"),
        ParameterSpec("rotation", "categorical", levels=("CW", "CCW")),
    ))
