import numpy as np
import pytest

from jacobispec.jacobi import JacobiParams, build_quadrature

PRESETS = [(-0.5, -0.5), (0.0, 0.0), (0.5, 0.5), (2.0, 0.5)]


@pytest.fixture(scope="session")
def quad1024():
    return build_quadrature(1024)


@pytest.fixture(scope="session")
def quad2048():
    return build_quadrature(2048)


@pytest.fixture(scope="session")
def quad4096():
    return build_quadrature(4096)


@pytest.fixture(params=PRESETS, ids=lambda ab: f"a{ab[0]}_b{ab[1]}")
def params(request):
    return JacobiParams(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
