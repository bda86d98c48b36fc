"""Collects the acceptance tests and prints one verdict line per criterion."""

import re

_ACCEPTANCE: dict[int, dict] = {}
_NAME = re.compile(r"test_acceptance\.py::test_c(\d+)_")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    entry = _ACCEPTANCE.setdefault(n, {"ok": True, "ran": False, "title": report.nodeid.split("::")[-1]})
    if report.when == "call":
        entry["ran"] = True
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False
    for key, value in report.user_properties:
        if key == "caveat":
            entry["caveat"] = value


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[n]
        verdict = "PASS" if e["ok"] and e["ran"] else "FAIL"
        title = e["title"].split("_", 2)[-1].replace("_", " ")
        line = f"ACCEPTANCE C{n} {verdict} {title}"
        if "caveat" in e:
            line += f" [{e['caveat']}]"
        terminalreporter.write_line(line)
