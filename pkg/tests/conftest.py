import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qboolearn.kernels import available_backends

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=20)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    log = request.config.stash[_ACCEPTANCE]

    def record(number, name, passed, detail=""):
        log.append((number, name, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = sorted(config.stash.get(_ACCEPTANCE, []), key=lambda r: r[0])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in log:
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name} -- {detail}")


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
