import pytest

# criterion id -> [title, outcomes]
_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key, title = marker.args
    entry = _criteria.setdefault(key, [title, []])
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry[1].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: (isinstance(k, str), k)):
        title, results = _criteria[key]
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"[{status}] {key}: {title}")
