import pytest
from mpmath import mp

from utaylor.precision import DEFAULT_PRECISION_BITS, set_precision


@pytest.fixture(autouse=True)
def _default_precision():
    set_precision(DEFAULT_PRECISION_BITS)
    yield
    mp.prec = DEFAULT_PRECISION_BITS
