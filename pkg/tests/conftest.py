from fractions import Fraction

import pytest
from hypothesis import strategies as st

from kore.setalgebra import CoFin, Fin

_results: list[tuple[str, str]] = []


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; the outcome is printed at the end of the run."""
    names = []

    def declare(name):
        names.append(name)

    yield declare
    rep = getattr(request.node, "rep_call", None)
    outcome = "PASS" if rep is not None and rep.passed else "FAIL"
    for name in names:
        _results.append((name, outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _results:
        terminalreporter.write_line(f"{outcome}  {name}")


players = st.integers(min_value=1, max_value=12)
player_sets = st.lists(players, max_size=5)
fincof = st.one_of(player_sets.map(Fin), player_sets.map(CoFin))
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def F(x):
    return Fraction(x)
