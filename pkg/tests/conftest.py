"""Collects the acceptance verdicts and prints one line per criterion after the run."""

ACCEPTANCE_LINES = {}


def record(number, name, passed, detail):
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES[(number, name)] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (k[0], k[1])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
