import sys

import pytest
from hypothesis import strategies as st

from diagbounds.core import TestTable
from diagbounds.datasets import EMBEDDED

DATASETS = tuple(EMBEDDED)


@pytest.fixture
def dilation():
    return EMBEDDED["dilation"].table


@pytest.fixture
def stq():
    return EMBEDDED["stq"].table


@pytest.fixture
def binax():
    return EMBEDDED["bin"].table


@pytest.fixture
def ct_gietema():
    return EMBEDDED["ct-gietema"].table


@pytest.fixture
def ct_ai():
    return EMBEDDED["ct-ai"].table


@pytest.fixture(params=DATASETS)
def embedded(request):
    return EMBEDDED[request.param].table


@st.composite
def tables(draw, min_cell=0.0):
    """Random tables with positive yields on both tests."""
    raw = [draw(st.floats(min_value=min_cell, max_value=1.0)) for _ in range(4)]
    raw[3] = max(raw[3], 1e-3)
    raw[0] = max(raw[0], 1e-3)
    total = sum(raw)
    return TestTable.from_probs(*(r / total for r in raw))


@st.composite
def table_and_sigma(draw, min_cell=0.0):
    table = draw(tables(min_cell))
    frac = draw(st.floats(min_value=1e-3, max_value=1.0))
    sigma = table.gamma + frac * (1.0 - table.gamma)
    return table, sigma


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        passed, detail = module.RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
