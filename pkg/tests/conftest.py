import numpy as np
import pytest

from echotomo.noise import example_noise_model_path, load_noise_model


@pytest.fixture
def rng():
    return np.random.default_rng(20221102)


@pytest.fixture(scope="session")
def example_noise():
    return load_noise_model(example_noise_model_path())


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
