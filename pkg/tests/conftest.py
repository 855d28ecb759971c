import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tempoloop import golden  # noqa: E402
from tempoloop.config import ExperimentConfig  # noqa: E402
from tempoloop.micro import MicroPropagator, MicroState  # noqa: E402
from tempoloop.twoscale import serial_reference  # noqa: E402


class ConstantRateMicro(MicroPropagator):
    """Trivial micro problem: growth ``alpha / (1 + c)``, periodic from the first cycle."""

    def __init__(self, alpha=3e-8):
        self.alpha = alpha

    def run_cycle(self, w0, c_s):
        return w0, self.alpha / (1.0 + c_s)


class LinearRateMicro(MicroPropagator):
    """Growth rate linear in c_s, so piecewise-linear interpolation is exact."""

    def __init__(self, a=3e-8, b=-1e-8):
        self.a, self.b = a, b

    def run_cycle(self, w0, c_s):
        return MicroState(w0.v + 1.0, w0.tau), self.a + self.b * c_s


@pytest.fixture(scope="session")
def defaults():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def micro(defaults):
    return defaults.micro()


@pytest.fixture(scope="session")
def gold():
    return golden.load()


@pytest.fixture(scope="session")
def reference(defaults, micro):
    return serial_reference(micro, defaults.T_end_days, defaults.dt_fine_days)


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
