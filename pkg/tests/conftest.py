from functools import lru_cache

import numpy as np
import pytest

from riemscatter import build_complex

SEED = 20240611

# Complexes whose scattering defect is still above roundoff at N = 16, so a
# strictly decreasing refinement ladder is observable.
CORPUS_SPECS = {
    "quadratic_0.3": [(0, [1, 0.3])],
    "quadratic_0.45": [(0, [1, 0.45])],
    "annulus_0.5": [(0, [0.5, 0.05]), (0, [1.0], True)],
    "two_caps_close": [(0, [0.5]), (1.2, [0.4, 0.05])],
    "three_caps": [(0, [0.3, 0.03]), (1, [0.25, -0.02j]), (0.4 + 0.9j, [0.2, 0.01])],
}
CIRCLE_SPEC = [(0, [1.0])]

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def corpus_complex(name: str, truncation: int = 24):
    spec = CIRCLE_SPEC if name == "circle" else CORPUS_SPECS[name]
    return build_complex(spec, truncation)


@pytest.fixture(params=sorted(CORPUS_SPECS))
def corpus_name(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def circle():
    return corpus_complex("circle")


@pytest.fixture
def quadratic():
    return corpus_complex("quadratic_0.3")


@pytest.fixture
def three_caps():
    return corpus_complex("three_caps")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
