import os
from pathlib import Path

import pytest

from quarticstats.config import default_cache_dir

# criterion number -> list of (part, passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


def record(n: int, part: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(n, []).append((part, bool(ok), detail))
    print(f"[criterion {n}] {part}: {'pass' if ok else 'FAIL'} {detail}")
    return bool(ok)


@pytest.fixture(scope="session")
def shared_cache() -> Path:
    """Long enumerations (orbits to 10^6, Selmer to 10^5) are reused across sessions."""
    d = default_cache_dir() if "QUARTIC_CACHE" in os.environ else Path.home() / ".cache" / "quarticstats"
    d.mkdir(parents=True, exist_ok=True)
    return d


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        failed = [p for p, ok, _ in parts if not ok]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {n:2d}: {status}" + (f"  (failed: {', '.join(failed)})" if failed else ""))
        for p, ok, detail in parts:
            tr.write_line(f"    {'ok ' if ok else 'BAD'} {p} {detail}".rstrip())
