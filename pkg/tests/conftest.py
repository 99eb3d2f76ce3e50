import pytest

_criteria: dict[int, dict] = {}


def _entry(item) -> dict | None:
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    number, title = mark.args
    return _criteria.setdefault(number, {"title": title, "failed": False, "notes": []})


@pytest.fixture
def note(request):
    """Attach a measured value to the acceptance summary line of the current criterion."""
    entry = _entry(request.node)

    def add(text: str) -> None:
        if entry is not None:
            entry["notes"].append(text)

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    entry = _entry(item)
    if entry is not None and report.failed:
        entry["failed"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] else "PASS"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {entry['title']}")
        for text in entry["notes"]:
            terminalreporter.write_line(f"    {text}")
