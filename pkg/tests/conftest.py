"""Shared pytest plumbing: the acceptance scoreboard.

Acceptance tests register one line per criterion through record();
the terminal summary then prints the whole scoreboard, pass and fail
alike, so a single glance shows which quantitative targets the build
meets and which it honestly misses.
"""

_RECORDS = {}


def record(number, name, passed, detail=""):
    """Register an acceptance criterion outcome for the summary."""
    _RECORDS[int(number)] = (str(name), bool(passed), str(detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RECORDS:
        return
    terminalreporter.section("acceptance scoreboard")
    for number in sorted(_RECORDS):
        name, passed, detail = _RECORDS[number]
        word = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(
            f"ACCEPTANCE {number:02d} {name}: {word}{suffix}"
        )
