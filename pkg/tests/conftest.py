from __future__ import annotations

import sys

import pytest

from isocrater.curve import curve_new
from isocrater.graph import attach_level_structures, build_crater
from isocrater.qorder import QuadOrder

# (p, a, b, crater discriminant, ell)
EX1 = (107, 43, 86, -71, 5)
EX2 = (47, 14, 5, -124, 5)
EX3 = (53, 46, 6, -44, 3)

_craters: dict = {}
_graphs: dict = {}


def crater_for(spec):
    p, a, b, D, ell = spec
    key = (p, a, b, D, ell)
    if key not in _craters:
        _craters[key] = build_crater(curve_new(a, b, p), ell, QuadOrder(D))
    return _craters[key]


def graph_for(spec, N, kind):
    key = (spec, N, kind)
    if key not in _graphs:
        _graphs[key] = attach_level_structures(crater_for(spec), N, kind)
    return _graphs[key]


@pytest.fixture(scope="session")
def ex1_crater():
    return crater_for(EX1)


@pytest.fixture(scope="session")
def ex2_crater():
    return crater_for(EX2)


@pytest.fixture(scope="session")
def ex3_crater():
    return crater_for(EX3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    RESULTS = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for line in RESULTS.values():
        terminalreporter.write_line(line)
