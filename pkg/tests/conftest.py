import numpy as np
import pytest

from ckfit import datagen


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def dataset_a():
    return datagen.generate(datagen.preset("A"))


@pytest.fixture(scope="session")
def dataset_a_noisy():
    return datagen.generate(datagen.preset("A", 0.5, 0))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
