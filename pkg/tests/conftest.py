import json
import pathlib

import pytest

ARTIFACT = pathlib.Path(__file__).resolve().parents[1] / "artifacts" / "acceptance_study.json"

_results = {}
_study = {}


class _Recorder:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.detail = ""

    def note(self, text):
        self.detail = text

    def study(self, key, value):
        _study[key] = value


@pytest.fixture
def criterion(request):
    """Tag an acceptance test with its criterion number and title."""
    marker = request.node.get_closest_marker("criterion")
    rec = _Recorder(*marker.args)
    yield rec
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    _results[rec.number] = (ok, rec.title, rec.detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        ok, title, detail = _results[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
    if _study:
        ARTIFACT.parent.mkdir(exist_ok=True)
        ARTIFACT.write_text(json.dumps(_study, indent=2, sort_keys=True) + "\n")
        terminalreporter.write_line(f"study artifact: {ARTIFACT}")
