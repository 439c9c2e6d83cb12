import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from bpe_atlas import (build_classical, build_example1, build_example2, cauchy_dual,
                       example1_weight, wandering_basis)


class Family:
    def __init__(self, name, graph, weights):
        self.name = name
        self.graph = graph
        self.weights = weights
        self.dual = cauchy_dual(graph, weights)
        self.basis = wandering_basis(graph, weights)


def make_family(name, depth):
    if name == "example1":
        g, w = build_example1(depth)
    elif name == "classical":
        g, w = build_classical(np.ones(depth), depth)
    elif name == "example2":
        g, w = build_example2(3, example1_weight, depth)
    else:
        raise KeyError(name)
    return Family(name, g, w)


FAMILY_NAMES = ("example1", "classical", "example2")


@pytest.fixture(params=FAMILY_NAMES)
def family(request):
    return make_family(request.param, 260)


@pytest.fixture(scope="session")
def ex1_big():
    return make_family("example1", 2100)


@pytest.fixture(scope="session")
def ex2_big():
    return make_family("example2", 2100)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
