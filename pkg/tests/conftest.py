from fractions import Fraction

import pytest

from hyperconv.config import get_settings
from hyperconv.core.algebra import symmetric_group
from hyperconv.core.constructions import DeformationWeights, cp1, cp2, dunkl_ramirez, max_deformation
from hyperconv.core.hypergroup import Window


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Each test sees settings built from its own environment"""
    for name in ("THREADS", "WINDOW", "DEPTH", "SEED", "PROPERTY_CASES", "LOG_LEVEL", "DEBUG"):
        monkeypatch.delenv(f"HYPERCONV_{name}", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def CP1():
    return cp1()


@pytest.fixture
def CP2():
    return cp2()


@pytest.fixture
def dr_third():
    return dunkl_ramirez(Fraction(1, 3))


@pytest.fixture
def example_k():
    """Max deformation with v_n = 3^(n-1): q_1(1) = 0 and the center is {0, 1}"""
    return max_deformation(DeformationWeights.geometric(3, shift=1), 20)


@pytest.fixture
def S3():
    return symmetric_group(3)


@pytest.fixture
def small_window():
    return Window.range(0, 9)
