import numpy as np
import pytest

from persuade_net import Exponential, GameParams, erdos_renyi, unilateral_effort

EDGE_PROBS = (0.3, 0.5, 0.7)

# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE = {}


def corpus_graphs():
    """50 seeded G(n, p) graphs: n cycles through 3..10, p through 0.3/0.5/0.7, seed = index."""
    return [erdos_renyi(3 + i % 8, EDGE_PROBS[i % 3], i) for i in range(50)]


@pytest.fixture(scope="session")
def corpus():
    return corpus_graphs()


@pytest.fixture(scope="session")
def example1():
    return GameParams(Exponential(0.9, 0.5), 0.3, 0.5)


@pytest.fixture(scope="session")
def example2():
    return GameParams(Exponential(0.9, 0.2), 0.3, 0.5)


@pytest.fixture(scope="session")
def e_mid(example1):
    return unilateral_effort(example1, 0.5)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
