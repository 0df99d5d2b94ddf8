import numpy as np
import pytest
from hypothesis import settings

from pgtoeplitz import symbol_algebra as sa
from pgtoeplitz.models import build_dimer_symbols

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def dimers():
    return build_dimer_symbols()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_laurent(rng, dim=2, span=1):
    terms = {}
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            terms[(m, n)] = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return sa.LaurentMatrix(dim, terms)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
