"""Collects the acceptance verdicts and prints them after the run."""

VERDICTS = {}


def record(number, title, passed, detail):
    VERDICTS[number] = (title, bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        title, passed, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
