import numpy as np
import pytest
from hypothesis import settings

from svstokes.harness import build_mesh
from svstokes.mesh import generate_rect_mesh

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")


@pytest.fixture(scope="session")
def m3_meshes():
    return {N: build_mesh(N, "full") for N in (4, 8, 16)}


@pytest.fixture(scope="session")
def unit_diag2():
    return generate_rect_mesh(0, 1, 0, 1, 2, "diagonal")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py and
# printed after the run regardless of output capturing
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
