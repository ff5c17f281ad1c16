import numpy as np
import pytest

from matorth import WeightParams
from matorth.linalg import max_abs


def rel_dev(x, y) -> float:
    x, y = np.asarray(x), np.asarray(y)
    return max_abs(x - y) / max(1.0, max_abs(x), max_abs(y))


def poly_rel_dev(x, y) -> float:
    return (x - y).max_coeff() / max(1.0, x.max_coeff(), y.max_coeff())


@pytest.fixture
def flagship() -> WeightParams:
    """The default 2x2 member used throughout: a = 1, b = 2."""
    return WeightParams(2, (1.0,), 2.0)


@pytest.fixture
def grid() -> np.ndarray:
    return np.linspace(-3.0, 3.0, 11)
