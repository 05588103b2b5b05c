"""Run configuration: the single source of truth a run is reproducible from.

A run config can be built in code or loaded from a YAML file.  The file
parser rejects unknown keys at every level so typos surface immediately,
and fills documented defaults for everything omitted; the fully resolved
config is echoed into the journal header.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import yaml

from .design_space import (DesignSpace, Genome, ParameterSpec,
                           default_turbine_space, validate_genome, validate_space)
from .oracle import OracleConstants
from .optimizer import EAParams
from .surrogate import FitHyper


class ConfigError(ValueError):
    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class RunConfig:
    space: DesignSpace
    positions: int = 1
    layout_bounds: tuple[float, float] = (0.25, 2.0)
    spacing: float = 0.75
    wind_speeds: tuple[float, ...] = (1.0,)
    oracle_kind: str = "synthetic"                       # synthetic | manual
    constants: object = OracleConstants()                # one, or a per-position list
    ea: EAParams = EAParams()
    fit_hyper: FitHyper = FitHyper()
    seed: int = 0
    budget: int = 100
    seeds_per_position: int = 10
    proposals_per_iteration: int = 1
    seed_designs: tuple[tuple[Genome, ...], ...] = ()    # per position, may be shorter than N

    def validate(self) -> list[str]:
        out = list(validate_space(self.space))
        if not 1 <= self.positions <= 6:
            out.append(f"positions {self.positions} outside [1, 6]")
        lo, hi = self.layout_bounds
        if not lo < hi:
            out.append("layout bounds must satisfy lower < upper")
        elif not lo <= self.spacing <= hi:
            out.append(f"spacing {self.spacing} outside layout bounds [{lo}, {hi}]")
        if not self.wind_speeds or any(v <= 0 for v in self.wind_speeds):
            out.append("wind speeds must be nonempty and positive")
        if self.oracle_kind not in ("synthetic", "manual"):
            out.append(f"unknown oracle kind {self.oracle_kind!r}")
        if self.budget < self.positions * self.seeds_per_position:
            out.append("budget below the seeding cost positions*seeds_per_position")
        if self.seeds_per_position < 1:
            out.append("seeds_per_position must be >= 1")
        if self.proposals_per_iteration < 1:
            out.append("proposals_per_iteration must be >= 1")
        if len(self.seed_designs) > self.positions:
            out.append("more seed-design groups than positions")
        for p, group in enumerate(self.seed_designs):
            if len(group) > self.seeds_per_position:
                out.append(f"position {p + 1}: more seed designs than seeds_per_position")
            for g in group:
                out.extend(f"position {p + 1} seed: {v}"
                           for v in validate_genome(g, self.space))
        return out

    def constants_for(self, position: int) -> OracleConstants:
        if isinstance(self.constants, OracleConstants):
            return self.constants
        return self.constants[position]


def _check_keys(block: dict, allowed: set[str], where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError([f"unknown key {k!r} in {where}" for k in sorted(unknown)])


def _space_from_list(items) -> DesignSpace:
    params = []
    for item in items:
        _check_keys(item, {"name", "kind", "lower", "upper", "levels", "units"}, "design_space entry")
        params.append(ParameterSpec(
            name=item.get("name", ""),
            kind=item.get("kind", ""),
            lower=item.get("lower"),
            upper=item.get("upper"),
            levels=tuple(item["levels"]) if "levels" in item else None,
            units=item.get("units", ""),
        ))
    return DesignSpace(tuple(params))


def _space_to_list(space: DesignSpace) -> list[dict]:
    out = []
    for p in space.parameters:
        d = {"name": p.name, "kind": p.kind}
        if p.kind == "categorical":
            d["levels"] = list(p.levels)
        else:
            d["lower"] = p.lower
            d["upper"] = p.upper
        if p.units:
            d["units"] = p.units
        out.append(d)
    return out


def _constants_from(block) -> OracleConstants:
    allowed = {f.name for f in dataclasses.fields(OracleConstants)}
    _check_keys(block, allowed, "oracle.constants")
    return OracleConstants(**block)


def config_to_dict(cfg: RunConfig) -> dict:
    consts = cfg.constants
    if isinstance(consts, OracleConstants):
        consts_doc = dataclasses.asdict(consts)
    else:
        consts_doc = [dataclasses.asdict(c) for c in consts]
    return {
        "design_space": _space_to_list(cfg.space),
        "positions": cfg.positions,
        "layout_bounds": list(cfg.layout_bounds),
        "spacing": cfg.spacing,
        "wind_speeds": list(cfg.wind_speeds),
        "oracle": {"kind": cfg.oracle_kind, "constants": consts_doc},
        "ea": dataclasses.asdict(cfg.ea),
        "fit": dataclasses.asdict(cfg.fit_hyper),
        "seed": cfg.seed,
        "budget": cfg.budget,
        "seeds_per_position": cfg.seeds_per_position,
        "proposals_per_iteration": cfg.proposals_per_iteration,
        "seed_designs": [
            [list(g.values) for g in group] for group in cfg.seed_designs
        ],
    }


_TOP_KEYS = {
    "design_space", "positions", "layout_bounds", "spacing", "wind_speeds",
    "oracle", "ea", "fit", "seed", "budget", "seeds_per_position",
    "proposals_per_iteration", "seed_designs",
}


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    _check_keys(doc, _TOP_KEYS, "configuration")

    space = (_space_from_list(doc["design_space"])
             if "design_space" in doc else default_turbine_space())

    oracle_kind = "synthetic"
    constants: object = OracleConstants()
    if "oracle" in doc:
        _check_keys(doc["oracle"], {"kind", "constants"}, "oracle")
        oracle_kind = doc["oracle"].get("kind", "synthetic")
        raw = doc["oracle"].get("constants")
        if raw is not None:
            if isinstance(raw, list):
                constants = [_constants_from(c) for c in raw]
            else:
                constants = _constants_from(raw)

    ea = EAParams()
    if "ea" in doc:
        allowed = {f.name for f in dataclasses.fields(EAParams)}
        _check_keys(doc["ea"], allowed, "ea")
        ea = EAParams(**doc["ea"])

    fit_hyper = FitHyper()
    if "fit" in doc:
        allowed = {f.name for f in dataclasses.fields(FitHyper)}
        _check_keys(doc["fit"], allowed, "fit")
        fit_hyper = FitHyper(**doc["fit"])

    seed_designs = tuple(
        tuple(Genome(tuple(v)) for v in group)
        for group in doc.get("seed_designs", [])
    )

    cfg = RunConfig(
        space=space,
        positions=int(doc.get("positions", 1)),
        layout_bounds=tuple(doc.get("layout_bounds", (0.25, 2.0))),
        spacing=float(doc.get("spacing", 0.75)),
        wind_speeds=tuple(doc.get("wind_speeds", (1.0,))),
        oracle_kind=oracle_kind,
        constants=constants,
        ea=ea,
        fit_hyper=fit_hyper,
        seed=int(doc.get("seed", 0)),
        budget=int(doc.get("budget", 100)),
        seeds_per_position=int(doc.get("seeds_per_position", 10)),
        proposals_per_iteration=int(doc.get("proposals_per_iteration", 1)),
        seed_designs=seed_designs,
    )
    bad = cfg.validate()
    if bad:
        raise ConfigError(bad)
    return cfg


def load_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        doc = yaml.safe_load(f)
    return config_from_dict(doc if doc is not None else {})
