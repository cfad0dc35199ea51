from __future__ import annotations

import pytest


@pytest.fixture(scope="session")
def verdict(request):
    """One visible PASS/FAIL line per acceptance check.

    Writes through pytest's terminal reporter, which holds the real
    stdout even under fd-level capture.
    """
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(num: int, label: str, ok: bool, detail: str) -> None:
        line = f"[acceptance {num:02d}] {label}: {'PASS' if ok else 'FAIL'} ({detail})"
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)
        assert ok, line

    return emit
