import sys

import pytest
from hypothesis import HealthCheck, settings

from heisfrob.frobenius import fleet

settings.register_profile(
    "heisfrob",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("heisfrob")

FLEET = fleet()
KS = (-2, -1, 0, 1, 2)


@pytest.fixture(scope="session")
def algebras():
    return FLEET


@pytest.fixture(params=list(FLEET), scope="session")
def algebra(request):
    return FLEET[request.param]


def pytest_terminal_summary(terminalreporter, config):
    mod = sys.modules.get("test_acceptance")
    lines = config.stash.get(mod.ACCEPTANCE_KEY, []) if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
