import math
from pathlib import Path

import numpy as np
import pytest

from ctrlfusion.config import load_system

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ACCEPTANCE_LINES = []


def random_invertible(rng, n, cplx=False, max_cond=1e6):
    while True:
        C = rng.standard_normal((n, n))
        if cplx:
            C = C + 1j * rng.standard_normal((n, n))
        s = np.linalg.svd(C, compute_uv=False)
        if s[0] / s[-1] <= max_cond:
            return C


def random_unitary(rng, n, cplx=True):
    G = rng.standard_normal((n, n))
    if cplx:
        G = G + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def r3_as_written():
    return load_system(FIXTURES / "r3_as_written.json")


@pytest.fixture(scope="session")
def r3_parseval():
    return load_system(FIXTURES / "r3_parseval.json")


@pytest.fixture(scope="session")
def r3_four():
    return load_system(FIXTURES / "r3_four_member.json")


@pytest.fixture
def record_acceptance():
    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


SQRT_HALF = math.sqrt(0.5)
