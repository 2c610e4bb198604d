import pytest

from _acceptance_log import LINES


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _quiet_float_warnings():
    import numpy as np

    with np.errstate(over="raise", invalid="raise"):
        yield
