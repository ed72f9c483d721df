from __future__ import annotations

from collections import defaultdict

_DESCRIPTIONS: dict[int, str] = {}
_OUTCOMES: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, description): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, description = mark.args
            _DESCRIPTIONS[number] = description
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _OUTCOMES[number].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _DESCRIPTIONS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_DESCRIPTIONS):
        results = _OUTCOMES.get(number, [])
        verdict = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {number:>2}: {_DESCRIPTIONS[number]}")

