import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

from atilde.exactlin import PrimeField, Rationals  # noqa: E402
from atilde.quivers import build_k  # noqa: E402


@pytest.fixture(scope="session")
def k32():
    return build_k(3, 2)


@pytest.fixture(scope="session")
def f101():
    return PrimeField(101)


@pytest.fixture(scope="session")
def f5():
    return PrimeField(5)


@pytest.fixture(scope="session")
def qq():
    return Rationals()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(k for k in results if isinstance(k, int)):
        terminalreporter.write_line(results[n])
