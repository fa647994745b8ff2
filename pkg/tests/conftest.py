import pytest

from scgbackdoor.cone import CausalQuery
from scgbackdoor.graph import SCG

THERMO_SERIES = ["Outside", "K", "L", "B", "O"]
THERMO_EDGES = [
    ("Outside", "L"), ("Outside", "K"), ("Outside", "B"),
    ("L", "O"), ("L", "K"), ("K", "L"), ("L", "B"), ("B", "L"),
] + [(v, v) for v in THERMO_SERIES]

THERMO_TEXT = "\n".join(f"{a} -> {b}" for a, b in THERMO_EDGES) + "\n"

# Z <-> X, X -> Y, self-loops on X and Z
FIG2_EDGES = [("Z", "X"), ("X", "Z"), ("X", "Y"), ("X", "X"), ("Z", "Z")]


def thermo():
    return SCG(THERMO_SERIES, THERMO_EDGES)


def fig2():
    return SCG(["X", "Y", "Z"], FIG2_EDGES)


@pytest.fixture
def thermo_g():
    return thermo()


@pytest.fixture
def fig2_g():
    return fig2()


@pytest.fixture
def thermo_q():
    return CausalQuery([("K", -1), ("L", -1)], [("O", 0)])


@pytest.fixture
def thermo_q2():
    return CausalQuery([("K", -1), ("L", -1), ("L", 0)], [("O", 0)])


# acceptance results are collected here by tests/test_acceptance.py and
# printed once at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
