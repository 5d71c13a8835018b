import itertools
import os
import tempfile

import pytest
from hypothesis import HealthCheck, settings

from oan.runtime import Robot
from oan.sim import SimConfig, SimServer

settings.register_profile(
    "oan", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("oan")

_ids = itertools.count()
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def fresh_endpoint() -> str:
    # short path: AF_UNIX paths are limited to ~100 bytes
    return os.path.join(tempfile.gettempdir(), f"oan-t{os.getpid()}-{next(_ids)}")


@pytest.fixture
def endpoint():
    path = fresh_endpoint()
    yield path
    try:
        os.unlink(path)
    except OSError:
        pass


@pytest.fixture
def sim(endpoint):
    server = SimServer(endpoint, SimConfig(seed=1))
    server.start()
    yield server
    server.stop()


@pytest.fixture
def robot(sim):
    bot = Robot.connect(sim.endpoint)
    yield bot
    bot.stop()


@pytest.fixture
def services():
    from oan.dialogue import MockServices
    mock = MockServices(port=0).start()
    yield mock
    mock.stop()
