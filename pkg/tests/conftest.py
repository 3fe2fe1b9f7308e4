ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    # surface the acceptance verdicts even when stdout capture is on
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
