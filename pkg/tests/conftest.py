"""Shared pytest wiring: surfaces the acceptance verdict lines.

The acceptance tests record one pass/fail line per criterion; printing from
inside a test would be swallowed by capture, so the lines are replayed in a
dedicated section after the run.
"""

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
