import math

import numpy as np
import pytest

from conftest import band_symbol
from szegolab.errors import DomainError
from szegolab.schatten import (
    hilbert_schmidt_hankel_exact,
    peller_ratio,
    schatten_norm,
    schatten_scan,
    singular_spectrum,
)
from szegolab.sections import hankel_section
from szegolab.symbol import constant, symbol_from_coefficients

P_VALUES = [1.0, 1.5, 2.0, 3.0, 4.0, math.inf]


def test_schatten_examples(a_star):
    assert schatten_norm(np.zeros((3, 3)), 2) == 0.0
    assert schatten_norm(hankel_section(a_star, 5, 5), 2) == pytest.approx(0.5, abs=1e-15)
    assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0, rel=1e-15)
    assert schatten_norm(np.diag([3.0, 4.0]), 1) == pytest.approx(7.0, rel=1e-15)
    assert schatten_norm(np.diag([3.0, 4.0]), math.inf) == pytest.approx(4.0, rel=1e-15)


def test_p_below_one_rejected():
    with pytest.raises(DomainError):
        schatten_norm(np.eye(2), 0.5)


def test_hs_exact_examples():
    assert hilbert_schmidt_hankel_exact(symbol_from_coefficients({0: 1, 1: 0.5})) == pytest.approx(0.5)
    assert hilbert_schmidt_hankel_exact(symbol_from_coefficients({2: 1})) == pytest.approx(math.sqrt(2))
    assert hilbert_schmidt_hankel_exact(symbol_from_coefficients({-3: 1, 0: 2})) == 0.0


def test_hs_exact_matches_svd(rng):
    for N in (1, 2, 3):
        for bw in (1, 4, 9):
            a = band_symbol(rng, N, bw)
            assert hilbert_schmidt_hankel_exact(a) == pytest.approx(
                schatten_norm(hankel_section(a, bw, bw), 2), rel=1e-12)


def test_frobenius_identity(rng):
    for _ in range(10):
        K = rng.standard_normal((7, 5)) + 1j * rng.standard_normal((7, 5))
        assert schatten_norm(K, 2) ** 2 == pytest.approx(np.sum(np.abs(K) ** 2), rel=1e-10)


def test_monotone_in_p(rng):
    for _ in range(20):
        s = singular_spectrum(rng.standard_normal((6, 6)))
        norms = [s.norm(p) for p in P_VALUES]
        assert all(x >= y * (1 - 1e-14) for x, y in zip(norms, norms[1:]))


@pytest.mark.parametrize("p, q, r", [(2, 2, 1), (4, 4, 2)])
def test_holder(rng, p, q, r):
    for _ in range(30):
        K = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        L = rng.standard_normal((6, 6))
        assert schatten_norm(K @ L, r) <= schatten_norm(K, p) * schatten_norm(L, q) + 1e-10


def test_scan_examples():
    a = symbol_from_coefficients({0: 1, 1: 0.5})
    for _, v in schatten_scan(a, 2, [4, 8, 16, 32, 64]):
        assert v == pytest.approx(0.5, abs=1e-15)
    assert all(v == 0 for _, v in schatten_scan(constant(1.0), 3, [1, 2, 4]))
    with pytest.raises(DomainError):
        schatten_scan(a, 2, [4, 2])


def test_peller_ratio_is_report_only():
    rep = peller_ratio(symbol_from_coefficients({0: 1, 1: 0.5, 2: 0.25}), 2.0)
    assert set(rep) >= {"ratio", "hankel_schatten", "besov_norm"}
    assert rep["ratio"] > 0
