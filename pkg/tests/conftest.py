import numpy as np
import pytest

from gapdmd.datagen import GeneratorSpec, generate
from gapdmd.matstore import SnapshotMatrix

ACCEPTANCE_SPEC = dict(N=500, L=120, periods=(30,), seed=7)


@pytest.fixture(scope="session")
def periodic30():
    """Acceptance dataset: exactly 30-periodic, N=500, L=120, seed 7."""
    return generate(GeneratorSpec(noise_rel=0.0, **ACCEPTANCE_SPEC))


@pytest.fixture(scope="session")
def noisy30():
    return generate(GeneratorSpec(noise_rel=1e-3, **ACCEPTANCE_SPEC))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def periodic_columns(n_dim, period, length, seed=0):
    """Random independent columns repeated with the given period."""
    base = np.random.default_rng(seed).standard_normal((n_dim, period))
    return SnapshotMatrix(base[:, np.arange(length) % period])


_results = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _results.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
