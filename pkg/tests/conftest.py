import pytest
from fractions import Fraction

from qfrob.hyperq import QHParams
from qfrob.qspecial import QContext


@pytest.fixture(scope="session")
def golden_params():
    """p = 3, q = 4, a = (1/5, 0), h = 1/2."""
    return QHParams((Fraction(1, 5), Fraction(0)), Fraction(1, 2), QContext(3, Fraction(3), 15))
