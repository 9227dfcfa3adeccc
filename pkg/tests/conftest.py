import functools
import sys

import pytest
from hypothesis import settings

from multivax import Mesh, make_preset, run

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")


@functools.lru_cache(maxsize=None)
def cached_run(preset, strategy, dt=0.05, horizon_T=730.0):
    """Full runs are ~1.5 s each, so tests share them."""
    spec, init = make_preset(preset, dt=dt)
    return run(spec, init, strategy, Mesh(dt=dt, horizon_T=horizon_T), label=preset)


@pytest.fixture(scope="session")
def runs():
    return cached_run


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
