import numpy as np
import pytest

from nmecut.entangle import SchmidtVector


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_schmidt(n: int, rng, margin: float = 0.05) -> SchmidtVector:
    """Random sorted Schmidt vector with robustness at most ``2^n - 1 - margin``."""
    while True:
        sv = SchmidtVector.from_values(rng.random(1 << n))
        if sv.robustness <= (1 << n) - 1 - margin:
            return sv


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
