import numpy as np
import pytest

from qphysreal.model import StateSpace

ACCEPTANCE_LINES = []


def random_system(rng, n, n_u=2):
    return StateSpace(
        rng.uniform(-1, 1, (n, n)),
        rng.uniform(-1, 1, (n, n_u)),
        rng.uniform(-1, 1, (n_u, n)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    def _record(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
