from pathlib import Path

import pytest

from ballspace import CkFunction, FiniteMetricSpace, OtFunction, ck_to_ot

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def tri():
    """3-point space d(a,b)=1, d(a,c)=2, d(b,c)=1 with CK values (3,1,0)."""
    space = FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]], "abc")
    ck = CkFunction((3, 1, 0))
    return space, ck, ck_to_ot(ck)


@pytest.fixture
def line4():
    return FiniteMetricSpace.on_line([0, 1, 2, 3])


@pytest.fixture
def truncated(line4):
    """Finite truncation of phi(x,y) = x - y for x != 0, phi(0, y) = 0."""
    phi = OtFunction(tuple(tuple(0 if x == 0 else x - y for y in range(4)) for x in range(4)))
    return line4, phi
