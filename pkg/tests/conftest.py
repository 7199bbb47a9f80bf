from __future__ import annotations

import re

_CRITERION = re.compile(r"::test_criterion_(\d+)_([a-z0-9_]+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion that ran."""
    results: dict[int, tuple[str, bool]] = {}
    for outcome, reports in terminalreporter.stats.items():
        # "" holds passed setup/teardown records; outcome keys carry verdicts.
        if outcome not in ("passed", "failed", "error", "skipped"):
            continue
        for rep in reports:
            match = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not match:
                continue
            number = int(match.group(1))
            label = match.group(2).replace("_", " ")
            previous_ok = results.get(number, (label, True))[1]
            results[number] = (label, previous_ok and outcome == "passed")
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        label, passed = results[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label}): {status}")
