import os
import sys
from fractions import Fraction

import hypothesis
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from joinlab.core import make_finite_system  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def finite_systems(draw, max_size=4):
    """Random permutation with a random positive rational measure constant on cycles."""
    n = draw(st.integers(1, max_size))
    perm = draw(st.permutations(range(n)))
    seen, cycles = set(), []
    for start in range(n):
        if start in seen:
            continue
        cycle, x = [], start
        while x not in seen:
            seen.add(x)
            cycle.append(x)
            x = perm[x]
        cycles.append(cycle)
    raw = [draw(st.integers(1, 4)) for _ in cycles]
    total = sum(r * len(c) for r, c in zip(raw, cycles))
    measure = [Fraction(0)] * n
    for r, c in zip(raw, cycles):
        for x in c:
            measure[x] = Fraction(r, total)
    return make_finite_system(perm, measure)


# -- acceptance summary -------------------------------------------------------

_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = marker.kwargs["criterion"]
    title = marker.kwargs.get("title", item.name)
    ok = report.passed if report.when == "call" else (report.passed or report.skipped)
    prev = _acceptance.get(key, (True, title))
    if report.when == "call" or not ok:
        _acceptance[key] = (prev[0] and ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance):
        ok, title = _acceptance[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {title}")
