from pathlib import Path

import pytest

from pebblegraph.roadmap import build_roadmap
from pebblegraph.scene import load_scene_file

SCENES = Path(__file__).resolve().parent.parent / "scenes"


@pytest.fixture(scope="session")
def scenes_dir():
    return SCENES


@pytest.fixture(scope="session")
def shelf():
    return load_scene_file(SCENES / "shelf.json")


@pytest.fixture(scope="session")
def shelf_rm(shelf):
    return build_roadmap(shelf, samples_per_mode=250, connection_neighbors=8, seed=0)


@pytest.fixture(scope="session")
def nonmonotone():
    return load_scene_file(SCENES / "nonmonotone.json")


@pytest.fixture(scope="session")
def nonmonotone_rm(nonmonotone):
    return build_roadmap(nonmonotone, seed=0)


@pytest.fixture(scope="session")
def sealed():
    return load_scene_file(SCENES / "sealed.json")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
