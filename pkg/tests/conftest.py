import numpy as np
import pytest

from pmurecover.datagen import ScenarioSpec, generate_synthetic

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_truth():
    X = generate_synthetic(ScenarioSpec())
    X.flags.writeable = False
    return X


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
