import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> list of (label, passed, detail)
ACCEPTANCE: dict = {}


@pytest.fixture
def record_criterion():
    def record(number: int, label: str, passed: bool, detail: str = ""):
        ACCEPTANCE.setdefault(number, []).append((label, bool(passed), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        ok = all(p for _, p, _ in checks)
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}")
        for label, passed, detail in checks:
            tr.write_line(f"    [{'ok' if passed else 'FAIL'}] {label} {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dense_operator(m, targets, n):
    """Full 2**n matrix of ``m`` on ``targets`` (targets[0] most significant), by brute force."""
    m = np.asarray(m)
    k = len(targets)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        local_col = 0
        for t in targets:
            local_col = (local_col << 1) | ((col >> t) & 1)
        for local_row in range(2**k):
            row = col
            for j, t in enumerate(targets):
                bit = (local_row >> (k - 1 - j)) & 1
                row = (row & ~(1 << t)) | (bit << t)
            out[row, col] += m[local_row, local_col]
    return out
