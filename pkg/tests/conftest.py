import os

import pytest
from hypothesis import HealthCheck, settings

from cantorlab import gawron_ulas, square_digits, ternary_cantor

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def ternary():
    return ternary_cantor()


@pytest.fixture(scope="session")
def square():
    return square_digits()


@pytest.fixture(scope="session")
def gu():
    return gawron_ulas()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
