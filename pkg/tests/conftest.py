import os
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture(autouse=True)
def _sample_cache(tmp_path, monkeypatch):
    """Keep sample caches out of the user's home directory."""
    monkeypatch.setenv("NCORR_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def zeros_1000_path():
    return DATA / "zeros_1000.txt"


@pytest.fixture(scope="session")
def zeros_1000(zeros_1000_path):
    from ncorr.zeta import load_zeros

    return load_zeros(zeros_1000_path)


def large_zeros_path():
    path = os.environ.get("NCORR_ZEROS_FILE")
    return Path(path) if path else None


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
