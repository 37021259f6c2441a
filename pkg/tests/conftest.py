from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import settings

from safebnb.corpus import load_corpus
from safebnb.problem import parse_problem

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ORACLES = Path(__file__).parent / "oracles"

CIRCLE = "var x in [-2,2]; var y in [-2,2]; min x + y; subject x^2 + y^2 - 1 = 0;"


@pytest.fixture(scope="session")
def circle():
    return parse_problem(CIRCLE, name="circle")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def lp_cases():
    return json.loads((ORACLES / "lp_cases.json").read_text())


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[n])
