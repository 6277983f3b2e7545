import numpy as np
import pytest

# criterion id -> [title, passed, details]
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def measured(request):
    """Record a measured value shown next to the criterion's PASS/FAIL line."""

    def note(text):
        request.node.user_properties.append(("measured", text))

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    cid, title = marker.args
    entry = _CRITERIA.setdefault(cid, [title, True, []])
    entry[1] = entry[1] and rep.passed
    if rep.when == "call":
        entry[2].extend(text for key, text in item.user_properties if key == "measured")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: (isinstance(c, str), c)):
        title, passed, details = _CRITERIA[cid]
        line = f"criterion {cid}: {'PASS' if passed else 'FAIL'}  {title}"
        if details:
            line += "  [" + "; ".join(details) + "]"
        terminalreporter.write_line(line)
