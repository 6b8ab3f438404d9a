import os
from pathlib import Path

import pytest

# keep generated tables out of the user's cache and reuse them across runs
_CACHE = Path(__file__).resolve().parent.parent / ".pytest_cache" / "zerosum-tables"
os.environ.setdefault("ZEROSUM_CACHE_DIR", str(_CACHE))


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch):
    from zerosum import tables

    monkeypatch.setenv("ZEROSUM_CACHE_DIR", str(tmp_path))
    tables.clear_memory_cache()
    yield tmp_path
    tables.clear_memory_cache()


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, name, secs, note = ACCEPTANCE[n]
        line = f"criterion {n:>2} {status}  {name} ({secs:.1f} s)"
        terminalreporter.write_line(line + (f"  {note}" if note else ""))
