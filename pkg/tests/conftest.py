import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def structured_frame(rng, size=64):
    """Random 10-bit frame with plateaus, shallow steps and texture patches."""
    kind = rng.integers(4)
    base = int(rng.integers(8, 1000))
    if kind == 0:
        block = int(rng.choice([2, 4, 8]))
        coarse = rng.integers(0, 5, size=(size // block + 1, size // block + 1))
        frame = np.kron(coarse, np.ones((block, block), dtype=np.int64))[:size, :size] + base
    elif kind == 1:
        frame = base + rng.integers(0, 4, size=(size, size))
    elif kind == 2:
        slope = rng.uniform(0.02, 0.3)
        ramp = np.floor(np.arange(size) * slope).astype(np.int64)
        frame = np.broadcast_to(ramp, (size, size)).copy() + base
        frame += rng.integers(0, 2, size=(size, size)) * (rng.random((size, size)) < 0.05)
    else:
        frame = base + np.floor(np.add.outer(np.arange(size), np.arange(size)) * rng.uniform(0.02, 0.1)).astype(np.int64)
        frame[rng.random((size, size)) < 0.1] += 6
    return np.clip(frame, 0, 1023).astype(np.uint16)


@pytest.fixture
def rng():
    return np.random.default_rng(20210602)


_acceptance_lines = []


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        name = report.nodeid.split("::")[-1]
        _acceptance_lines.append(f"{status}  {name}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
