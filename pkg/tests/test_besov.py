import math

import numpy as np
import pytest

from conftest import band_symbol
from oracles import CHI1_BESOV_SEMINORM, chi1_besov_seminorm
from szegolab.besov import (
    KreinParams,
    besov_norm,
    besov_seminorm,
    conjugation_number,
    krein_coefficient_sum,
    krein_norm,
    lp_norm,
    modulus_of_continuity,
    sup_norm,
)
from szegolab.errors import DomainError, InvalidParams
from szegolab.symbol import constant, monomial, multiply, symbol_from_coefficients

M = 512


def test_frozen_oracle_value():
    assert chi1_besov_seminorm() == pytest.approx(CHI1_BESOV_SEMINORM, rel=1e-13)


def test_modulus_of_constant():
    for s in (0.0, 0.3, math.pi):
        assert modulus_of_continuity(constant(2.5), 1, s, 2, M) == 0.0
        assert modulus_of_continuity(constant(2.5), 2, s, 2, M) == 0.0


def test_modulus_chi1_examples():
    chi = monomial(1)
    assert modulus_of_continuity(chi, 1, math.pi, 2, M) == pytest.approx(2.0, abs=1e-14)
    for j in (1, 7, 64, 200, 256):
        s = 2 * math.pi * j / M
        assert modulus_of_continuity(chi, 2, s, 2, M) == pytest.approx(4 * math.sin(s / 2) ** 2, abs=1e-13)


def test_modulus_negative_s():
    with pytest.raises(DomainError):
        modulus_of_continuity(monomial(1), 1, -0.1)


def test_modulus_properties(rng):
    ss = np.linspace(0, 2 * math.pi, 41)
    for _ in range(8):
        f, g = band_symbol(rng, 1, 4), band_symbol(rng, 1, 3)
        w1 = [modulus_of_continuity(f, 1, s, 2, M) for s in ss]
        assert all(x <= y for x, y in zip(w1, w1[1:]))
        for s in ss[::5]:
            wf = modulus_of_continuity(f, 1, s, 2, M)
            assert modulus_of_continuity(f + g, 1, s, 2, M) <= wf + modulus_of_continuity(g, 1, s, 2, M) + 1e-12
            assert modulus_of_continuity(f, 2, s, 2, M) <= 2 * wf + 1e-12


def test_seminorm_examples():
    assert besov_seminorm(constant(3.0), 2, 0.5) == 0.0
    chi = monomial(1)
    assert besov_seminorm(chi, 2, 0.5) == pytest.approx(CHI1_BESOV_SEMINORM, rel=1e-6)
    assert besov_seminorm(chi.scale(3), 2, 0.5) == pytest.approx(3 * besov_seminorm(chi, 2, 0.5), rel=1e-12)


def test_seminorm_non_hilbert_exponent():
    # p = 3 goes through the trapezoid path rather than the Parseval shortcut
    chi = monomial(1)
    v = besov_seminorm(chi, 3, 0.5)
    assert besov_seminorm(chi.scale(-2j), 3, 0.5) == pytest.approx(2 * v, rel=1e-10)
    assert besov_seminorm(monomial(-1), 3, 0.5) == pytest.approx(v, rel=1e-10)


def test_seminorm_homogeneity_and_triangle(rng):
    for p, alpha in [(2, 0.5), (3, 0.4), (2, 1.0)]:
        for _ in range(5):
            f, g = band_symbol(rng, 1, 3), band_symbol(rng, 1, 5)
            c = complex(rng.standard_normal(), rng.standard_normal())
            sf = besov_seminorm(f, p, alpha)
            assert besov_seminorm(f.scale(c), p, alpha) == pytest.approx(abs(c) * sf, rel=1e-6)
            assert besov_seminorm(f + g, p, alpha) <= (sf + besov_seminorm(g, p, alpha)) * (1 + 1e-6)


def test_norms_of_monomials():
    assert lp_norm(monomial(3), 2.5) == pytest.approx(1.0, rel=1e-14)
    assert sup_norm(symbol_from_coefficients({-1: 0.5, 0: 1.25, 1: 0.5})) == pytest.approx(2.25)
    chi = monomial(1)
    assert besov_norm(chi, 2, 0.5) == pytest.approx(1 + besov_seminorm(chi, 2, 0.5), rel=1e-14)


def test_conjugation_examples():
    assert conjugation_number(KreinParams(2, 2, 0.5, 0.5)) == (1.0, 1)
    lam, m = conjugation_number(KreinParams(4, 4, 0.25, 0.25))
    assert lam == pytest.approx(0.5) and m == 2
    lam, m = conjugation_number(KreinParams(p=3, alpha=0.5))
    assert lam == pytest.approx(1 / 3) and m == 3
    assert KreinParams(q=2, beta=0.6).m == 2


@pytest.mark.parametrize("kw", [
    dict(p=2, alpha=0.3),          # alpha < 1/p for K_{p,0}
    dict(q=4, beta=0.1),           # beta < 1/q for K_{0,q}
    dict(p=2, q=2, alpha=0.4, beta=0.5),
    dict(p=1, alpha=0.5),
    dict(p=2),
    dict(),
])
def test_invalid_params(kw):
    with pytest.raises(InvalidParams):
        KreinParams(**kw)


def test_joint_conjugation_needs_matching_sum():
    with pytest.raises(InvalidParams):
        conjugation_number(KreinParams(2, 2, 0.6, 0.5))


def test_krein_norm_examples():
    one = constant(1.0)
    # ||1||_inf = 1; Q1 = 0; P1 = 1 has Besov norm ||1||_{L^p} + 0 = 1
    assert krein_norm(one, KreinParams(p=2, alpha=0.5)) == pytest.approx(1.0)
    assert krein_norm(one, KreinParams(q=2, beta=0.5)) == pytest.approx(2.0)
    assert krein_norm(one, KreinParams(2, 2, 0.5, 0.5)) == pytest.approx(2.0)
    chi = monomial(-1)
    params = KreinParams(p=2, alpha=0.5)
    assert krein_norm(chi, params) == pytest.approx(1 + 1 + besov_seminorm(chi, 2, 0.5), rel=1e-12)


def test_krein_quasi_submultiplicative(a_star):
    params = KreinParams(2, 2, 0.5, 0.5)
    assert krein_norm(multiply(a_star, a_star), params) <= 16 * krein_norm(a_star, params) ** 2


def test_block_norm_is_entrywise_max():
    a = symbol_from_coefficients({1: [[1, 0], [0, 3]]}, 2)
    assert besov_seminorm(a, 2, 0.5) == pytest.approx(3 * besov_seminorm(monomial(1), 2, 0.5), rel=1e-12)


def test_krein_membership_matches_coefficient_test():
    seminorms, sums = [], []
    for K in (8, 32, 128):
        a = symbol_from_coefficients({k: 1.0 / k for k in range(1, K + 1)})
        seminorms.append(besov_seminorm(a, 2, 0.5) ** 2)
        sums.append(krein_coefficient_sum(a))
    assert all(math.isfinite(x) for x in seminorms + sums)
    # both grow like log K along the 1/k tail
    assert seminorms == sorted(seminorms) and sums == sorted(sums)
    assert sums[-1] - sums[0] > 2.5 and seminorms[-1] - seminorms[0] > 7
    ratios = np.array(seminorms) / np.array(sums)
    assert ratios.max() / ratios.min() < 1.1
