import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graphonreg.kernel import StepKernel

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_measures(rng, n):
    m = rng.random(n) + 0.05
    return m / m.sum()


def random_kernel(rng, m, n, low=0.0, high=1.0):
    return StepKernel(random_measures(rng, m), random_measures(rng, n),
                      rng.uniform(low, high, size=(m, n)))


@st.composite
def kernels(draw, max_steps=5, low=-1.0, high=1.0):
    m = draw(st.integers(1, max_steps))
    n = draw(st.integers(1, max_steps))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_kernel(np.random.default_rng(seed), m, n, low, high)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, text: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    print(ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
