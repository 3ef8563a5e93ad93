import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_AC = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_ac(\d+)_", report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if report.when == "call" or report.failed:
        detail = ""
        if report.failed and report.longrepr is not None:
            lines = [ln for ln in str(report.longrepr).splitlines() if ln.startswith("E ")]
            detail = lines[0][1:].strip() if lines else ""
        _AC[key] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _AC:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_AC):
        status, detail = _AC[key]
        line = f"AC-{key}: {status}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
