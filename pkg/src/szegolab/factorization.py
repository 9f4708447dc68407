"""Canonical Wiener-Hopf factorization of matrix symbols by finite-section inversion.

For ``a = u_- u_+`` with ``T(a)`` invertible, ``T(a)^{-1} = T(u_+^{-1}) T(u_-^{-1})``.
Block column 0 of the inverse therefore carries the coefficients of
``u_+^{-1}`` (times ``(u_-^{-1})_0``) and block row 0 those of ``u_-^{-1}``.
Finite sections ``T_n(a)^{-1}`` approximate both; ``n`` doubles until the
reconstruction residual is small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NonCanonicalSymbol, SingularSymbol
from .sections import MAX_DIM, toeplitz_matrix
from .symbol import (
    FourierSymbol,
    _canonical,
    constant,
    invert,
    multiply,
    sample,
    symbol_from_document,
    symbol_to_document,
    tilde,
    winding_number,
)


@dataclass(frozen=True, eq=False)
class Factorization:
    """``a = u_minus * u_plus`` (side ``"right"``) or ``a = u_plus * u_minus`` (``"left"``).

    ``u_minus`` is supported on ``k <= 0`` and ``u_plus`` on ``k >= 0``.  The
    right factorization is normalized by ``(u_plus)_0 = I``, the left one by
    ``(u_minus)_0 = I``.
    """

    u_minus: FourierSymbol
    u_plus: FourierSymbol
    residual: float
    side: str = "right"
    u_minus_inv: FourierSymbol | None = field(default=None, repr=False)
    u_plus_inv: FourierSymbol | None = field(default=None, repr=False)
    section_n: int | None = None

    def product(self) -> FourierSymbol:
        if self.side == "right":
            return multiply(self.u_minus, self.u_plus)
        return multiply(self.u_plus, self.u_minus)

    def minus_inverse(self) -> FourierSymbol:
        return self.u_minus_inv if self.u_minus_inv is not None else invert(self.u_minus)

    def plus_inverse(self) -> FourierSymbol:
        return self.u_plus_inv if self.u_plus_inv is not None else invert(self.u_plus)

    def renormalized(self, C: np.ndarray) -> "Factorization":
        """Move a constant invertible block ``C`` between the factors.

        Right: ``(u_- C, C^{-1} u_+)``.  Left: ``(u_+ C, C^{-1} u_-)``.
        The product is unchanged.
        """
        C = np.asarray(C, dtype=complex).reshape(self.u_plus.N, self.u_plus.N)
        Cs, Ci = constant(C), constant(np.linalg.inv(C))
        if self.side == "right":
            inner, outer = self.u_minus, self.u_plus
            new_minus, new_plus = multiply(inner, Cs), multiply(Ci, outer)
            inv_minus = None if self.u_minus_inv is None else multiply(Ci, self.u_minus_inv)
            inv_plus = None if self.u_plus_inv is None else multiply(self.u_plus_inv, Cs)
        else:
            new_plus, new_minus = multiply(self.u_plus, Cs), multiply(Ci, self.u_minus)
            inv_plus = None if self.u_plus_inv is None else multiply(Ci, self.u_plus_inv)
            inv_minus = None if self.u_minus_inv is None else multiply(self.u_minus_inv, Cs)
        return replace(self, u_minus=new_minus, u_plus=new_plus,
                       u_minus_inv=inv_minus, u_plus_inv=inv_plus)


def _restrict(a: FourierSymbol, lo: int | None, hi: int | None) -> FourierSymbol:
    """Keep only coefficients with ``lo <= k <= hi``; discarded mass goes to the tail."""
    lo = a.lo if lo is None else max(lo, a.lo)
    hi = a.hi if hi is None else min(hi, a.hi)
    if lo > hi:
        return constant(0.0, a.N)
    kept = a.coeff_array(lo, hi)
    dropped = a.wiener_norm() - float(np.sum(np.linalg.norm(kept, ord=2, axis=(1, 2))))
    return _canonical(lo, kept, a.tail_bound + max(dropped, 0.0))


def _section_columns(a: FourierSymbol, n: int) -> tuple[np.ndarray, np.ndarray]:
    """First block column and first block row of ``T_n(a)^{-1}`` as block stacks."""
    N = a.N
    T = toeplitz_matrix(a, n + 1)
    E = np.zeros(((n + 1) * N, N))
    E[:N] = np.eye(N)
    lu = scipy.linalg.lu_factor(T)
    if np.min(np.abs(np.diag(lu[0]))) < 1e-13 * np.max(np.abs(np.diag(lu[0]))):
        raise np.linalg.LinAlgError("section is numerically singular")
    X = scipy.linalg.lu_solve(lu, E)
    Z = scipy.linalg.lu_solve(lu, E, trans=1)
    cols = X.reshape(n + 1, N, N)
    rows = Z.reshape(n + 1, N, N).transpose(0, 2, 1)
    return cols, rows


def _inv_tol(tol: float) -> float:
    return max(1e-13, min(1e-11, tol * 1e-2))


def factorize_right(a: FourierSymbol, tol: float = 1e-10, n_start: int | None = None,
                    max_n: int | None = None) -> Factorization:
    """Canonical right factorization ``a = u_- u_+`` with ``(u_+)_0 = I``."""
    w = winding_number(a)
    if w != 0:
        raise NonCanonicalSymbol(
            f"winding number of det a is {w}; no canonical factorization exists", winding=w)
    N = a.N
    n = n_start or 4 * (a.bandwidth + 1)
    max_n = max_n or MAX_DIM // N - 1
    itol = _inv_tol(tol)
    history = []
    failures = 0
    while True:
        try:
            cols, rows = _section_columns(a, n)
        except np.linalg.LinAlgError:
            failures += 1
            cols = None
        if cols is not None:
            X0inv = np.linalg.inv(cols[0])
            plus_inv = _canonical(0, cols @ X0inv)
            minus_inv = _canonical(-n, rows[::-1].copy())
            try:
                u_plus = _restrict(invert(plus_inv, tol=itol), 0, None)
                u_minus = _restrict(invert(minus_inv, tol=itol), None, 0)
            except (SingularSymbol, NoConvergence):
                u_plus = u_minus = None
            if u_plus is not None:
                # pin (u_+)_0 = I exactly
                c0 = u_plus.coeff(0)
                u_plus = multiply(constant(np.linalg.inv(c0)), u_plus)
                u_minus = multiply(u_minus, constant(c0))
                plus_inv = multiply(plus_inv, constant(c0))
                minus_inv = multiply(constant(np.linalg.inv(c0)), minus_inv)
                residual = (a - multiply(u_minus, u_plus)).wiener_norm()
                history.append(residual)
                if residual <= tol:
                    return Factorization(u_minus, u_plus, residual, "right",
                                         minus_inv, plus_inv, n)
        if 2 * n > max_n:
            if failures and not history:
                raise NonCanonicalSymbol("finite sections of T(a) stay singular", winding=0)
            raise NoConvergence(
                f"factorization residual stalled above tol {tol:.3g} (section n={n})",
                estimates=history[-2:])
        n *= 2


def factorize_left(a: FourierSymbol, tol: float = 1e-10, n_start: int | None = None,
                   max_n: int | None = None) -> Factorization:
    """Canonical left factorization ``a = v_+ v_-`` with ``(v_-)_0 = I``.

    Obtained by right-factorizing ``a~ = w_- w_+`` and setting ``v_+ = w_-~``,
    ``v_- = w_+~``.
    """
    f = factorize_right(tilde(a), tol, n_start, max_n)
    v_plus = tilde(f.u_minus)
    v_minus = tilde(f.u_plus)
    residual = (a - multiply(v_plus, v_minus)).wiener_norm()
    return Factorization(v_minus, v_plus, residual, "left",
                         tilde(f.u_plus_inv), tilde(f.u_minus_inv), f.section_n)


def compute_b_c(right: Factorization, left: Factorization) -> tuple[FourierSymbol, FourierSymbol]:
    """``b = v_- u_+^{-1}`` and ``c = u_-^{-1} v_+``."""
    if right.side != "right" or left.side != "left":
        raise ValueError("compute_b_c expects a right and a left factorization")
    b = multiply(left.u_minus, right.plus_inverse())
    c = multiply(right.minus_inverse(), left.u_plus)
    return b, c


@dataclass
class ValidationReport:
    residual: float
    tol: float
    winding: int | None
    support_ok: bool
    normalization_ok: bool
    factors_invertible: bool
    messages: list[str]

    @property
    def passed(self) -> bool:
        return (self.residual <= self.tol and self.support_ok and self.normalization_ok
                and self.factors_invertible and self.winding == 0)


def _factor_invertible(u: FourierSymbol) -> bool:
    try:
        return winding_number(u) == 0
    except SingularSymbol:
        return False
    except NoConvergence:
        return False


def validate_factorization(a: FourierSymbol, f: Factorization, tol: float = 1e-10) -> ValidationReport:
    """Re-check residual, supports, normalization and invertibility of the factors."""
    msgs = []
    try:
        winding = winding_number(a)
    except SingularSymbol:
        winding = None
        msgs.append("det a vanishes on the grid; a is not invertible")
    residual = (a - f.product()).wiener_norm()
    if residual > tol:
        msgs.append(f"reconstruction residual {residual:.3g} exceeds tol {tol:.3g}")
    support_ok = f.u_plus.lo >= 0 and f.u_minus.hi <= 0
    if f.u_plus.lo < 0:
        msgs.append(f"plus factor has coefficients at negative index {f.u_plus.lo}")
    if f.u_minus.hi > 0:
        msgs.append(f"minus factor has coefficients at positive index {f.u_minus.hi}")
    normed = f.u_plus if f.side == "right" else f.u_minus
    normalization_ok = bool(np.allclose(normed.coeff(0), np.eye(a.N), atol=tol))
    if not normalization_ok:
        msgs.append("normalizing factor does not have identity zeroth coefficient")
    invertible = _factor_invertible(f.u_plus) and _factor_invertible(f.u_minus)
    if not invertible:
        msgs.append("a factor is not invertible in its half-algebra (det vanishes or winds)")
    if winding not in (0, None):
        msgs.append(f"winding number of det a is {winding}: nonzero partial indices are the "
                    "likely cause, no canonical factorization exists")
    return ValidationReport(residual, tol, winding, support_ok, normalization_ok, invertible, msgs)


def factorization_to_document(f: Factorization) -> dict:
    norm = "(u_plus)_0 = I" if f.side == "right" else "(v_minus)_0 = I"
    return {
        "side": f.side,
        "normalization": norm,
        "residual": f.residual,
        "section_n": f.section_n,
        "minus": symbol_to_document(f.u_minus),
        "plus": symbol_to_document(f.u_plus),
    }


def factorization_from_document(doc: dict) -> Factorization:
    return Factorization(symbol_from_document(doc["minus"]), symbol_from_document(doc["plus"]),
                         float(doc["residual"]), doc["side"], section_n=doc.get("section_n"))


def save_factorization(f: Factorization, path) -> None:
    Path(path).write_text(json.dumps(factorization_to_document(f), indent=1))
