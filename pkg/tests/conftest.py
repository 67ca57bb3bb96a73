import numpy as np
import pytest
from hypothesis import strategies as st

from skagree.prob import JointPMF


def pmf_tables(shape, min_value=0.0):
    """Hypothesis strategy for normalized tables of the given shape."""
    n = int(np.prod(shape))
    return (st.lists(st.floats(min_value=min_value, max_value=1.0), min_size=n, max_size=n)
            .filter(lambda v: sum(v) > 1e-3)
            .map(lambda v: (np.array(v) / np.sum(v)).reshape(shape)))


def stochastic_rows(rows, cols):
    """Hypothesis strategy for row-stochastic matrices; each row is a pmf."""
    return st.lists(pmf_tables((cols,)), min_size=rows, max_size=rows).map(np.array)


def joint3(shape=(2, 2, 2)):
    return pmf_tables(shape).map(lambda t: JointPMF(("A", "B", "C"), t))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
