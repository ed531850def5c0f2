import _acceptance


def pytest_terminal_summary(terminalreporter):
    lines = _acceptance.lines()
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
