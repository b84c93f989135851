import random

import pytest

from sabotage.model import NONE, make_game


@pytest.fixture
def line_game():
    """a -> b -> goal with one unseen mark available."""
    return make_game(["a", "b", "goal", "s"], [("a", "b"), ("b", "goal")],
                     [("s", 1)], "a", ["goal"], observation=NONE)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
