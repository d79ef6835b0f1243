import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion as PASS or FAIL with a short detail."""
    state = {"detail": ""}

    def note(number, title):
        state.update(number=number, title=title)
        return state

    yield note
    failed = getattr(request.node, "rep_call", None)
    ok = failed is not None and failed.passed
    if "number" in state:
        CRITERIA[state["number"]] = (state["title"], ok, state["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, ok, detail = CRITERIA[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
