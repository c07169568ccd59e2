import json
import math
import os
import sys

import pytest

from khavinson import _backend

DATA = os.path.join(os.path.dirname(__file__), "data", "oracle_values.json")


@pytest.fixture(scope="session")
def oracle():
    with open(DATA) as fh:
        return json.load(fh)


def tau_of(entry):
    return math.pi / 2 if entry == "pi/2" else float(entry)


@pytest.fixture(params=list(_backend.AVAILABLE))
def backend(request):
    previous = _backend.use(request.param)
    yield request.param
    _backend.use(previous)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
