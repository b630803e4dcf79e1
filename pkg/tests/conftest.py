import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_op(rng, N):
    from dynrmat.tensorspace import ZeroWeightOp

    alpha = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    beta = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    np.fill_diagonal(beta, 0)
    return ZeroWeightOp(alpha, beta)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.pytest_terminal_summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
