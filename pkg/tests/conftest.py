import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from laplace_ode import Problem, fixture_path


@pytest.fixture(scope="session")
def problems():
    """Parsed and kernel-built fixture problems, shared across the session."""
    cache = {}

    def get(name: str) -> Problem:
        if name not in cache:
            cache[name] = Problem.from_file(fixture_path(name))
            cache[name].kernel  # build once
        return cache[name]

    return get


@pytest.fixture(scope="session")
def airy(problems):
    return problems("airy")
