import numpy as np
import pytest

from robust_fcm.core import Dataset

# filled by test_acceptance.py; printed once at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(rng, n_per=30, sep=10.0, d=2, k=2):
    centers = np.zeros((k, d))
    centers[:, 0] = sep * np.arange(k)
    X = np.vstack([c + rng.normal(size=(n_per, d)) for c in centers])
    y = np.repeat(np.arange(k), n_per)
    return Dataset(X, labels=y)
