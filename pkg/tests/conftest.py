import numpy as np
import pytest

from multient import named


@pytest.fixture
def ghz():
    return named.ghz()


@pytest.fixture
def w():
    return named.w()


@pytest.fixture
def psi_bis():
    return named.psi_bis()


@pytest.fixture
def phi():
    return named.phi()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- one summary line per acceptance criterion ----------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.failed or name not in _criteria:
        _criteria[name] = "FAIL" if report.failed else "PASS"
    if report.when == "call" and report.skipped:
        _criteria[name] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        number, label = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {number} ({label}): {_criteria[name]}")
