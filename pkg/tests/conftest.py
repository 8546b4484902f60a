import itertools
import math

import pytest


def brute_force_eta_tilde(vk, points):
    """Literal (2m)!-permutation average of eta; independent of split enumeration."""
    from ustatci.kernels import eval_eta

    vals = [eval_eta(vk, [points[i] for i in perm])
            for perm in itertools.permutations(range(len(points)))]
    return math.fsum(vals) / len(vals)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)


# -- acceptance reporting ------------------------------------------------------
# Tests marked ``@pytest.mark.acceptance(number, title)`` get one PASS/FAIL line
# in the terminal summary.

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _ACCEPTANCE[number] = (title, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}")
