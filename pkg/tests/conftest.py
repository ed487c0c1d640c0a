from __future__ import annotations

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance test, so the gate reads at a glance."""
    rows: dict[str, str] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::", 1)[1]
            label = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}[status]
            # A failed setup/teardown must not be shadowed by anything else.
            if rows.get(name) != "FAIL":
                rows[name] = label
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]}: {name}")


@pytest.fixture
def anyio_backend():
    return "asyncio"
