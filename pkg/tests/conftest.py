import json

import pytest

from yesno_uq.records import PredictionRecord


def make_record(rid="q1", margin=0.0, label=1, **kw):
    return PredictionRecord(id=rid, logit_yes=float(margin), logit_no=0.0, label=label, **kw)


@pytest.fixture
def jsonl(tmp_path):
    """Write a list of dicts as JSON Lines and return the path."""

    def _write(rows, name="records.jsonl"):
        path = tmp_path / name
        path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
        return path

    return _write


_acceptance: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _acceptance:
        terminalreporter.write_line(f"{status}  {label}")
