"""Collects acceptance outcomes and prints one line per criterion after the run."""
import pytest

_ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    number, title = mark.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "detail": ""})
    if call.when == "call":
        entry["seconds"] += call.duration
    if call.excinfo is not None:
        entry["ok"] = False
        entry["detail"] = call.excinfo.exconly().splitlines()[0][:160]


@pytest.fixture
def record(request):
    """Attach a short free-text summary to the current acceptance criterion."""
    mark = request.node.get_closest_marker("acceptance")

    def _record(text):
        number, title = mark.args
        entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "detail": ""})
        entry["detail"] = text

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        status = "PASS" if e["ok"] else "FAIL"
        line = f"ACCEPTANCE {number:>2} {status} {e['title']} ({e['seconds']:.1f}s)"
        if e["detail"]:
            line += f": {e['detail']}"
        terminalreporter.write_line(line)
