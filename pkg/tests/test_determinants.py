import cmath
import math

import numpy as np
import pytest

from conftest import dominant_symbol
from oracles import mean_log_det_direct, tridiagonal_det, tridiagonal_det_closed
from szegolab.determinants import (
    det_regularized,
    det_trace_class,
    geometric_mean,
    is_invertible_by_det,
    log_det,
    regularization_factor,
    regularized_remainder,
    toeplitz_determinant,
)
from szegolab.errors import SingularMatrix, WindingNonzero
from szegolab.symbol import constant, monomial, multiply, symbol_from_coefficients


def test_oracles_agree():
    for n in range(0, 30):
        assert tridiagonal_det(n) == pytest.approx(tridiagonal_det_closed(n), rel=1e-14)
    assert tridiagonal_det(1) == 1.3125


def test_log_det_examples():
    assert log_det(np.eye(5)) == log_det(np.eye(5)).__class__(0.0, 0.0)
    ld = log_det(np.diag([2.0, 2.0, 2.0]))
    assert ld.log_modulus == pytest.approx(3 * math.log(2)) and ld.phase == 0.0
    ld = log_det(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert ld.log_modulus == pytest.approx(0.0, abs=1e-15)
    assert ld.phase == pytest.approx(math.pi)
    assert ld.value == pytest.approx(-1.0)


def test_log_det_matches_numpy(rng):
    for n in (3, 10, 40):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        sign, logabs = np.linalg.slogdet(A)
        ld = log_det(A)
        assert ld.log_modulus == pytest.approx(logabs, rel=1e-12)
        assert abs(cmath.exp(1j * ld.phase) - sign) < 1e-10


def test_log_det_no_overflow():
    ld = log_det(np.eye(3000) * 1e3)
    assert ld.log_modulus == pytest.approx(3000 * math.log(1e3))


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_log_det_singular():
    with pytest.raises(SingularMatrix):
        log_det(np.zeros((3, 3)))


def test_toeplitz_determinant_examples(a_star):
    for n in (0, 3, 20):
        assert toeplitz_determinant(constant(2.0), n).log_modulus == pytest.approx((n + 1) * math.log(2))
        ld = toeplitz_determinant(symbol_from_coefficients({0: 1, 1: 0.5}), n)
        assert ld.value == pytest.approx(1.0, abs=1e-14)
    assert toeplitz_determinant(a_star, 1).value.real == pytest.approx(1.3125, rel=1e-15)


def test_toeplitz_determinant_recurrence(a_star):
    for n in list(range(0, 40)) + [100, 256, 512]:
        got = toeplitz_determinant(a_star, n).value
        assert abs(got - tridiagonal_det(n)) <= 1e-10 * tridiagonal_det(n)


def test_geometric_mean_examples(a_star):
    assert geometric_mean(constant(2.0)) == pytest.approx(2.0, abs=1e-12)
    assert geometric_mean(symbol_from_coefficients({0: 1, 1: 0.5})) == pytest.approx(1.0, abs=1e-12)
    assert geometric_mean(a_star) == pytest.approx(1.0, abs=1e-12)


def test_geometric_mean_against_direct_quadrature():
    a = symbol_from_coefficients({-2: 0.3j, 0: 2.0, 1: -0.4})

    def ext(r, t):
        return 2.0 + 0.3j * r ** 2 * np.exp(-2j * t) - 0.4 * r * np.exp(1j * t)

    # scalar, continuous, winding zero: G(a) is the exponential of the mean of log a on the circle
    ref = cmath.exp(mean_log_det_direct(ext, 1.0))
    assert geometric_mean(a) == pytest.approx(ref, abs=1e-10)
    near = cmath.exp(mean_log_det_direct(ext, 0.999))
    assert abs(near - ref) < 1e-3


def test_geometric_mean_multiplicative():
    a = symbol_from_coefficients({0: 1.5, 1: 0.3 - 0.2j, -1: 0.1})
    b = symbol_from_coefficients({0: 0.8j, -2: 0.2, 3: 0.1})
    assert geometric_mean(multiply(a, b)) == pytest.approx(geometric_mean(a) * geometric_mean(b), abs=1e-11)


def test_geometric_mean_block(rng):
    a = dominant_symbol(rng, 2, 2)
    g = geometric_mean(a)
    ld = toeplitz_determinant(a, 60).log - toeplitz_determinant(a, 59).log
    assert cmath.exp(ld) == pytest.approx(g, abs=1e-8)


def test_geometric_mean_needs_zero_winding():
    with pytest.raises(WindingNonzero):
        geometric_mean(monomial(1))


def test_first_szego_limit(a_star):
    ratio = toeplitz_determinant(a_star, 64).value / toeplitz_determinant(a_star, 63).value
    assert abs(ratio - geometric_mean(a_star)) <= 1e-6


def test_trace_class_examples():
    assert det_trace_class(np.zeros((3, 3))) == 1
    assert det_trace_class(np.diag([0.1, -0.2])) == pytest.approx(0.88)
    assert det_trace_class(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)


def test_regularized_examples(rng):
    assert det_regularized(np.array([[0.1]]), 2) == pytest.approx(1.1 * math.exp(-0.1), rel=1e-15)
    assert det_regularized(np.array([[0.1]]), 2).real == pytest.approx(0.9953212, abs=5e-8)
    K = rng.standard_normal((5, 5))
    assert det_regularized(K, 1) == pytest.approx(np.linalg.det(np.eye(5) + K), rel=1e-12)
    assert det_regularized(np.array([[0.0, 1.0], [0.0, 0.0]]), 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        regularization_factor(K, 0)


def test_remainder_path(rng):
    for m in (1, 2, 3, 4):
        for _ in range(10):
            K = 0.3 * (rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
            assert det_trace_class(regularized_remainder(K, m)) == pytest.approx(det_regularized(K, m), rel=1e-8)


def test_invertibility_predicate(rng):
    for _ in range(20):
        K = rng.standard_normal((8, 8))
        U, s, Vh = np.linalg.svd(np.eye(8) + K)
        s[-1] = 0.0
        singular = U @ np.diag(s) @ Vh - np.eye(8)
        for m in (1, 2, 3):
            assert is_invertible_by_det(K, m)
            assert not is_invertible_by_det(singular, m)
