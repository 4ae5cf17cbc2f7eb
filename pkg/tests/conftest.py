import itertools

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from resetword import Dfa

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@st.composite
def automata(draw, max_n=6, max_k=3):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_k))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=k, max_size=k), min_size=n, max_size=n))
    return Dfa(n, k, tuple(map(tuple, rows)))


def all_automata(n, k=2):
    """Every complete DFA with ``n`` states over ``k`` letters."""
    for flat in itertools.product(range(n), repeat=n * k):
        yield Dfa(n, k, tuple(tuple(flat[q * k:(q + 1) * k]) for q in range(n)))


def brute_antichain(sets, minimal=True):
    """Pairwise filter: drop every set with a strictly smaller (larger) comparable set."""
    distinct = set(sets)
    if minimal:
        return {s for s in distinct if not any(t != s and t & s == t for t in distinct)}
    return {s for s in distinct if not any(t != s and t & s == s for t in distinct)}


@pytest.fixture
def c4():
    from resetword import cerny

    return cerny(4)


ACCEPTANCE_LINES: list[str] = []


def verdict(label: str, ok: bool, detail: str):
    """Record and print one pass/fail line, then fail the test if needed."""
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
