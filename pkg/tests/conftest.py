import sys
import pytest
from pathlib import Path

# Add the src directory to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from semifinite.algebra import TracialAlgebra
from semifinite.config import ToleranceConfig
from semifinite.generators import RandomOperatorGenerator

# pytest-asyncio runs in auto mode (see pytest.ini), so async tests need no marker


@pytest.fixture
def tol():
    """Default tolerances, independent of SNL_* variables in the environment."""
    return ToleranceConfig()


@pytest.fixture
def m2():
    return TracialAlgebra.factor(2)


@pytest.fixture
def two_block():
    """M_2 with weight 0.5 plus M_3 with weight 1.5."""
    return TracialAlgebra.from_specs([(2, 0.5), (3, 1.5)])


@pytest.fixture
def generator():
    return RandomOperatorGenerator(seed=20240601)


@pytest.fixture
def e11(m2):
    return m2.operator([[[1, 0], [0, 0]]])


@pytest.fixture
def e12(m2):
    return m2.operator([[[0, 1], [0, 0]]])
