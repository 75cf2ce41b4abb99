"""Collects the one-line acceptance verdicts and prints them at the end of
the run, so they show up without ``-s``."""

ACCEPTANCE_LINES = []


def record(criterion, passed, text):
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
