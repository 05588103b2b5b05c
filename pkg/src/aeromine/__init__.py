"""aeromine: surrogate-assisted cooperative coevolution for interacting
turbine arrays, with a synthetic benchmark oracle and a human-in-the-loop
measurement path."""

from .config import RunConfig, load_config_file
from .design_space import (DesignSpace, Genome, ParameterSpec, default_turbine_space,
                           denormalize, normalize, random_genome, validate_space)
from .engine import Engine, RunResult, baseline_run, run
from .oracle import (ArrayConfiguration, ManualOracle, ManualQueue, Measurement,
                     OracleConstants, SyntheticOracle, aggregate_fitness,
                     brute_force_optimum, synthetic_evaluate)
from .rng import RandomKey

__all__ = [
    "ArrayConfiguration", "DesignSpace", "Engine", "Genome", "ManualOracle",
    "ManualQueue", "Measurement", "OracleConstants", "ParameterSpec",
    "RandomKey", "RunConfig", "RunResult", "SyntheticOracle",
    "aggregate_fitness", "baseline_run", "brute_force_optimum",
    "default_turbine_space", "denormalize", "load_config_file", "normalize",
    "random_genome", "run", "synthetic_evaluate", "validate_space",
]

__version__ = "0.1.0"
