import numpy as np
import pytest

from ppt_volume.randgen import SeededStream, sample_density_matrices


@pytest.fixture
def stream():
    return SeededStream(20240601)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, n, size=None):
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return 0.5 * (z + np.conj(np.swapaxes(z, -1, -2)))


def random_states(dims, count, seed=7):
    return sample_density_matrices(dims[0], dims[1], SeededStream(seed), count)[1]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
