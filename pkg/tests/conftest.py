import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("numeric")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def off_walls(system, rng, count, clearance=0.1, scale=1.5):
    """Gaussian points at least ``clearance`` from every reflecting hyperplane."""
    out = []
    while len(out) < count:
        x = scale * rng.standard_normal(system.dim)
        if np.min(np.abs(system.positive_roots @ x)) / np.sqrt(2) >= clearance:
            out.append(x)
    return np.array(out)


CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request, capsys):
    """Record one PASS/FAIL line per acceptance criterion, echoed live and in the summary."""
    lines = request.config.stash.setdefault(CRITERIA, [])

    def report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
