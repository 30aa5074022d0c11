import numpy as np
import pytest

from nsmop import ObjectiveOracle, Problem


def make_quadratic_pair(center1=(1.0, 0.0), center2=(-1.0, 0.0)) -> Problem:
    """Two smooth convex quadratics ||x - c1||^2 and ||x - c2||^2."""
    c1 = np.asarray(center1, dtype=float)
    c2 = np.asarray(center2, dtype=float)
    return Problem(
        "quad-pair",
        [
            ObjectiveOracle(lambda x, c=c1: float((x - c) @ (x - c)),
                            lambda x, c=c1: 2.0 * (x - c), "q1"),
            ObjectiveOracle(lambda x, c=c2: float((x - c) @ (x - c)),
                            lambda x, c=c2: 2.0 * (x - c), "q2"),
        ],
        dimension=2,
    )


def make_single_quadratic(scale=0.5) -> Problem:
    """k = 1 smooth problem scale * ||x||^2."""
    return Problem(
        "single-quad",
        [
            ObjectiveOracle(lambda x: float(scale * (x @ x)),
                            lambda x: 2.0 * scale * x, "q"),
        ],
        dimension=2,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
