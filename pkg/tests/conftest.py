import numpy as np
import pytest

from trahahn.canonical import CubicODESpec
from trahahn.parameters import REFERENCE, sample_admissible

_ACCEPTANCE = {}


def draws(count, seed=20240611, symmetric=False):
    rng = np.random.default_rng(seed)
    return [sample_admissible(rng, symmetric=symmetric) for _ in range(count)]


def random_spec(rng):
    """Cubic-coefficient equation with well separated roots in [-5, 5]."""
    while True:
        roots = np.sort(rng.uniform(-5, 5, 3))
        if np.min(np.diff(roots)) >= 0.1:
            break
    return CubicODESpec(
        roots=tuple(rng.permutation(roots)),
        pi0=rng.uniform(-10, 10),
        pi2=tuple(rng.uniform(-10, 10, 3)),
        pihat2=tuple(rng.uniform(-10, 10, 3)),
        pi1=tuple(rng.uniform(-10, 10, 2)),
    )


@pytest.fixture
def ref():
    return REFERENCE


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE[marker.args[0]] = (rep.outcome, item.function.__doc__ or item.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        outcome, doc = _ACCEPTANCE[key]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {key:>2}: {doc.strip().splitlines()[0]}")
