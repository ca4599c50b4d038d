import numpy as np
import pytest

from modcs.numkit import IndexSet, SignPattern


@pytest.fixture
def bp_gap_matrix():
    """2x3 matrix whose third column is a short combination of the first two.

    Basis Pursuit prefers (0.3, 0.3, 0) over the 1-sparse e3; knowing index 2
    fixes that.
    """
    return np.array([[1.0, 0.0, 0.3], [0.0, 1.0, 0.3]])


def iset(n, *members):
    return IndexSet(n, tuple(members))


def signs_on(delta, *signs):
    return SignPattern(delta, tuple(signs))


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record and print one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def report(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
