import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import _report  # noqa: E402
from szegolab.symbol import symbol_from_coefficients  # noqa: E402


def band_symbol(rng, N: int, bw: int, scale: float = 1.0, diag: float = 0.0):
    """Random band-limited symbol with coefficients in ``[-bw, bw]``."""
    coeffs = {}
    for k in range(-bw, bw + 1):
        blk = scale * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / (1 + abs(k))
        coeffs[k] = blk
    coeffs[0] = coeffs[0] + diag * np.eye(N)
    return symbol_from_coefficients(coeffs, N)


def dominant_symbol(rng, N: int, bw: int):
    """Band-limited symbol with ``a_0 = 3 I`` dominating, so winding is zero
    and all sections are invertible."""
    coeffs = {}
    for k in range(-bw, bw + 1):
        coeffs[k] = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / (2 * bw * N + 2)
    coeffs[0] = coeffs[0] + 3.0 * np.eye(N)
    return symbol_from_coefficients(coeffs, N)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def a_star():
    return symbol_from_coefficients({-1: 0.5, 0: 1.25, 1: 0.5})


@pytest.fixture
def a_block():
    return symbol_from_coefficients({
        -1: [[0, 0.5], [0, 0]],
        0: [[1.25, 0], [0, 1]],
        1: [[0, 0], [0.5, 0]],
    }, 2)


def pytest_terminal_summary(terminalreporter):
    if _report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _report.LINES:
            terminalreporter.write_line(line)
