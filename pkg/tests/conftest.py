import numpy as np
import pytest

from qdistill import ControlledSystem, ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def bh_4_2():
    """L=4, N=2, single-site A; the reference geometry for most checks."""
    return ControlledSystem(ModelSpec("bose_hubbard", 4, 1, N=2))


@pytest.fixture(scope="session")
def ising_4():
    return ControlledSystem(ModelSpec("ising", 4, 1))


# ---------------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per numbered criterion
# ---------------------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
