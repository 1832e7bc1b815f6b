import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from preisach_ff import build_mesh, gaussian_density, uniform_density

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mesh25():
    return build_mesh(25)


@pytest.fixture(scope="session")
def uniform25(mesh25):
    return uniform_density(mesh25)


@pytest.fixture(scope="session")
def gauss25(mesh25):
    return gaussian_density(mesh25)


@pytest.fixture(scope="session", params=["uniform", "gaussian"])
def density25(request, uniform25, gauss25):
    return uniform25 if request.param == "uniform" else gauss25


def piecewise_monotone(rng, n_steps, lo=-1.2, hi=1.2, edges=None):
    """Random runs between random turning points; sometimes lands on cell edges."""
    out = []
    u = 0.0
    while len(out) < n_steps:
        target = rng.uniform(lo, hi)
        if edges is not None and rng.random() < 0.3:
            target = float(rng.choice(edges))
        m = int(rng.integers(1, 40))
        out.extend(np.linspace(u, target, m + 1)[1:])
        u = target
    return np.array(out[:n_steps])
