import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mtscs import presets  # noqa: E402
from mtscs.lattice import Workspace, lattice_from_vertices  # noqa: E402
from mtscs.pose import Pose  # noqa: E402
from mtscs.steering import Steering  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def l1_lattice():
    return presets.l1(3, 0.5)


@pytest.fixture(scope="session")
def planning():
    return presets.planning_lattice(3, 0.5)


@pytest.fixture(scope="session")
def chain():
    """1-D chain s, (1,0), (2,0), (3,0) in the box [0, 3]."""
    poses = [Pose(float(x), 0.0) for x in range(4)]
    ws = Workspace.box((0.0, 0.0), (3.0, 0.0))
    return lattice_from_vertices(poses, ws, Steering("euclidean"), validity="swath")


@pytest.fixture(scope="session")
def unit_square():
    poses = [Pose(0.0, 0.0), Pose(1.0, 0.0), Pose(0.0, 1.0), Pose(1.0, 1.0)]
    ws = Workspace.box((0.0, 0.0), (1.0, 1.0))
    return lattice_from_vertices(poses, ws, Steering("euclidean"), validity="swath")
