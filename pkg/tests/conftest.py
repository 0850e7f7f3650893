"""Collects the acceptance verdict lines and prints them after the run.

Test bodies run under pytest's capture, so the one-line-per-criterion
summary is routed through a terminal-summary section instead of stdout.
"""

ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
