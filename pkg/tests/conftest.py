import time

import numpy as np
import pytest

from zetaspacing.constants import build_constant_set, sieve
from zetaspacing.curves import parse_grid
from zetaspacing.extract import extract_p1

# p1 is needed at alpha*s slightly beyond 4, so extraction runs on [0, 6]
WIDE_GRID = parse_grid("0:6:0.01")


@pytest.fixture(scope="session")
def constants7():
    return build_constant_set(10**7)


@pytest.fixture(scope="session")
def primes6():
    return sieve(10**6)


@pytest.fixture(scope="session")
def report():
    return extract_p1((16, 32, 64, 128), WIDE_GRID)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20261015)


# CUE_64 surrogate shared by the finite-N residual tests; about 4 minutes on one core
CUE64_SAMPLES = 100_000


@pytest.fixture(scope="session")
def cue64():
    from zetaspacing.mc import sample_cue

    t = time.perf_counter()
    run = sample_cue(64, CUE64_SAMPLES, seed=64)
    TIMINGS["cue64"] = time.perf_counter() - t
    return run


# acceptance lines, echoed after the test session
ACCEPTANCE_LINES: list[str] = []
TIMINGS: dict[str, float] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
