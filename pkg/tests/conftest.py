import numpy as np
import pytest

from meshsched.model import PhyConfig, RateTable, Topology


def make_topology(gains, links, gateways=(1,), phy=None):
    """Topology over a hand-written gain matrix; positions are placeholders."""
    gains = np.asarray(gains, dtype=float)
    n = len(gains)
    both = sorted(set(links) | {(j, i) for i, j in links})
    pos = np.column_stack([np.arange(n) * 10.0, np.zeros(n)])
    return Topology(positions=pos, links=tuple(both), gains=gains,
                    gateways=tuple(gateways), phy=phy or PhyConfig())


@pytest.fixture
def phy():
    return PhyConfig()


@pytest.fixture
def table():
    return RateTable.default()


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
