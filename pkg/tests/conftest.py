"""Shared pytest plumbing: the acceptance-criterion scoreboard."""

CRITERION_RESULTS = []


def record_criterion(number, description, passed):
    CRITERION_RESULTS.append((number, description, bool(passed)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_RESULTS:
        return
    # sub-criteria (e.g. 7.1 .. 7.4) collapse into one line per criterion
    merged = {}
    for number, description, passed in CRITERION_RESULTS:
        key = int(number)
        prev_desc, prev_ok = merged.get(key, (description, True))
        merged[key] = (prev_desc, prev_ok and passed)
    terminalreporter.section("acceptance criteria")
    for key in sorted(merged):
        description, passed = merged[key]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {key:2d} [{status}] {description}")
