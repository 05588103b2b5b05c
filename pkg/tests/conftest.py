import numpy as np
import pytest

from aeromine import (ArrayConfiguration, DesignSpace, Genome, OracleConstants,
                      ParameterSpec, default_turbine_space)


@pytest.fixture
def space():
    return default_turbine_space()


@pytest.fixture
def constants():
    return OracleConstants()


@pytest.fixture
def optimal_genome():
    # blades*chord/sigma_ref = 4*0.3/1.2 = 1 and shape at the optimum
    return Genome((4, 0.3, 0.6, "CW"))


def single_array(genome, speeds=(1.0,), spacing=0.25):
    return ArrayConfiguration((genome,), spacing, speeds)


def pair_array(g1, g2, spacing=0.75, speeds=(1.0,)):
    return ArrayConfiguration((g1, g2), spacing, speeds)
