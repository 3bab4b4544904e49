import numpy as np
import pytest

from cqpack import CqChannel

KET0 = np.array([1, 0], dtype=complex)
KETP = np.array([1, 1], dtype=complex) / np.sqrt(2)


def pure(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def plus_channel():
    """The non-commuting pair |0><0|, |+><+|."""
    return CqChannel.from_states([pure(KET0), pure(KETP)])


@pytest.fixture
def noiseless():
    return CqChannel.from_states([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def bsc(f):
    return CqChannel.from_states([np.diag([1 - f, f]), np.diag([f, 1 - f])])


ACCEPTANCE = []


def record(number, name, ok, detail):
    """Store one acceptance line; it is echoed in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name} | {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
