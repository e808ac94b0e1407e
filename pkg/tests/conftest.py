import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qconv.qcore import QContext  # noqa: E402

PARAMS = [(0.5, 1.0), (0.7, 0.5)]


@pytest.fixture(params=PARAMS, ids=["q0.5-g1", "q0.7-g0.5"])
def qg(request):
    q, gamma = request.param
    return QContext(q), gamma


@pytest.fixture
def ctx5():
    return QContext(0.5)


@pytest.fixture
def ctx7():
    return QContext(0.7)


def rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0
