"""Collect one PASS/FAIL line per acceptance criterion and print them at the end of the run."""
from acceptance_log import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, detail = RESULTS[n]
        terminalreporter.write_line(f"CRITERION {n}: {status}  {detail}")
