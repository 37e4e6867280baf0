import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from vstar.grammars import fixture
from vstar.vpg import Eps, Linear, Match

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# at least this many examples for every property suite
PROPERTY_CASES = 1000


def brute_accepts(g, s: str) -> bool:
    """Top-down recognizer that tries every split; independent of the
    library's subset simulation and lexer."""

    @lru_cache(maxsize=None)
    def derives(nt: str, i: int, j: int) -> bool:
        for r in g.rules_of(nt):
            if isinstance(r, Eps):
                if i == j:
                    return True
            elif isinstance(r, Linear):
                t = r.terminal
                if s.startswith(t, i) and i + len(t) <= j and derives(r.rhs, i + len(t), j):
                    return True
            elif isinstance(r, Match):
                if not s.startswith(r.call, i):
                    continue
                a = i + len(r.call)
                for k in range(a, j - len(r.ret) + 1):
                    if s.startswith(r.ret, k) and derives(r.inner, a, k) and derives(r.rest, k + len(r.ret), j):
                        return True
        return False

    return derives(g.start, 0, len(s))


@pytest.fixture(scope="session")
def fig1():
    return fixture("fig1")


@pytest.fixture(scope="session")
def toy_xml():
    return fixture("toy-xml")


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_criterion(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
