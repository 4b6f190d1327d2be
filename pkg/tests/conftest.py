import pytest

_criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    _criteria.append((number, title, rep.passed, rep.duration))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    merged = {}
    for number, title, passed, duration in _criteria:
        _, ok, total = merged.get(number, (title, True, 0.0))
        merged[number] = (title, ok and passed, total + duration)
    terminalreporter.section("acceptance criteria")
    for number in sorted(merged):
        title, ok, duration = merged[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} ({duration:.1f} s) {title}")
