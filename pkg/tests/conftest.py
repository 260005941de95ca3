import numpy as np
import pytest

from zakai_rbf import build_system, generate_wendland, radius_schedule, uniform_grid_1d
from zakai_rbf.config import default_config

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def wendland14():
    return generate_wendland(1, 4)


def default_system(N, scale=None):
    c = default_config()
    k = generate_wendland(1, c.kernel.tau, c.kernel.scale if scale is None else scale)
    return build_system(k, uniform_grid_1d(N, radius_schedule(N, c.kernel.tau)))


@pytest.fixture
def acceptance_report():
    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
