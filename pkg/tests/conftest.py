from __future__ import annotations

import sys

import pytest

from onlinesteiner.generators import gen_hard_instance
from onlinesteiner.graph import WeightedGraph


@pytest.fixture
def hard10():
    return gen_hard_instance(10)


@pytest.fixture
def path_abc():
    # a=0, b=1, c=2
    return WeightedGraph.from_edges(3, [(0, 1, 2), (1, 2, 3)])


@pytest.fixture
def star3():
    # center 0, unit leaves 1..3
    return WeightedGraph.from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
