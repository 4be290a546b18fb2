import numpy as np
import pytest

from mfscaling import GeneratorSpec, fgn_ensemble, generate

SEEDS = range(10)
N16 = 2 ** 16

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def white_noise():
    return [generate(GeneratorSpec("gaussian_white", N16, s)).series for s in SEEDS]


@pytest.fixture(scope="session")
def fgn07():
    return fgn_ensemble(0.7, N16, SEEDS)


@pytest.fixture(scope="session")
def cascade16():
    return generate(GeneratorSpec("binomial_cascade", seed=1,
                                  params={"a": 0.6, "depth": 16}))


@pytest.fixture(scope="session")
def levy_walks():
    out = []
    for s in SEEDS:
        inc = generate(GeneratorSpec("levy", N16, s, {"mu": 1.5})).series
        out.append(inc.replace(np.cumsum(inc.values)))
    return out


@pytest.fixture(scope="session")
def brownian():
    return [generate(GeneratorSpec("brownian", N16, s)).series for s in SEEDS]
