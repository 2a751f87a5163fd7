import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "tfquasi",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("tfquasi")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cgauss(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
