import os

import numpy as np
import pytest

from spgemm_oracle.bench import SUITESPARSE_GROUPS
from spgemm_oracle.csr import from_coo
from spgemm_oracle.fetch import FetchError, cache_path, fetch_suitesparse
from spgemm_oracle.mmio import read_matrix_market

# criterion number -> (status, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{status}] criterion {key}: {detail}")


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        """``passed=None`` marks the criterion as skipped."""
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        ACCEPTANCE[number] = (status, detail)
    return record


def random_pattern(rng: np.random.Generator, rows: int, cols: int, density: float):
    dense = rng.random((rows, cols)) < density
    r, c = np.nonzero(dense)
    return from_coo(rows, cols, r, c), dense


@pytest.fixture(scope="session")
def suitesparse():
    """Loader for SuiteSparse matrices; skips when neither cache nor network has them.

    Set SPGEMM_ORACLE_OFFLINE=1 to skip straight away instead of trying the network.
    """
    loaded = {}
    offline = os.environ.get("SPGEMM_ORACLE_OFFLINE") == "1"

    def load(name):
        if name in loaded:
            return loaded[name]
        group = SUITESPARSE_GROUPS[name]
        cached = cache_path(group, name)
        if not cached.is_file() and offline:
            pytest.skip(f"network-dependent: {group}/{name} not cached (offline)")
        try:
            path = fetch_suitesparse(group, name, timeout=30)
        except FetchError as exc:
            pytest.skip(f"network-dependent: {exc}")
        loaded[name] = read_matrix_market(path)
        return loaded[name]

    return load
