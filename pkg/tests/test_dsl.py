import math

import numpy as np
import pytest

from szegolab.dsl import parse_symbol
from szegolab.errors import EvalError, ParseError
from szegolab.symbol import constant, symbol_from_coefficients


def test_literal_read_off():
    assert parse_symbol("1 + 0.5*z").allclose(symbol_from_coefficients({0: 1, 1: 0.5}), atol=0)


def test_polynomial_expansion(a_star):
    assert parse_symbol("(1+0.5*z)*(1+0.5/z)").allclose(a_star, atol=1e-15)


def test_matrix_literal():
    a = parse_symbol("[[1, 0.5/z],[0, 1]]")
    assert a.N == 2
    assert np.allclose(a.coeff(-1), [[0, 0.5], [0, 0]])
    assert np.allclose(a.coeff(0), np.eye(2))
    assert parse_symbol("[1, 0.5/z; 0, 1]").allclose(a, atol=0)


def test_powers_and_unary():
    assert parse_symbol("z^-2").allclose(symbol_from_coefficients({-2: 1}), atol=1e-15)
    assert parse_symbol("-(z - 2*i)^2").allclose(
        symbol_from_coefficients({2: -1, 1: 4j, 0: 4}), atol=1e-15)


def test_exp_and_inverse():
    e = parse_symbol("exp(0.5*z)")
    for k in range(8):
        assert abs(e.coeff(k)[0, 0] - 0.5 ** k / math.factorial(k)) < 1e-13
    inv = parse_symbol("inv(2)")
    assert inv.allclose(constant(0.5), atol=1e-15)


def test_scalar_broadcast_in_matrix_context(a_block):
    a = parse_symbol("[[1, 0.5/z],[0, 1]] * [[1, 0],[0.5*z, 1]] + 0")
    assert a.allclose(a_block, atol=1e-15)


@pytest.mark.parametrize("expr, offset", [("1 + ", 4), ("(1+z", 4), ("2 $ z", 2), ("[[1,2],[3]]", 0)])
def test_parse_error_offset(expr, offset):
    with pytest.raises(ParseError) as info:
        parse_symbol(expr)
    assert info.value.offset == offset


def test_singular_inverse_is_eval_error():
    with pytest.raises(EvalError):
        parse_symbol("1/(1+z)")
