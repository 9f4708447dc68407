"""Convergence experiments for ``D_n(a) / G(a)^{n+1}``.

Two scans are provided: the plain Szego-Widom ratio against
``det T(a) T(a^{-1})``, and the higher-order corrected ratio

    D_n / G^{n+1} * exp(-sum_{j<m} tr[(sum_{k<m} F_{n,k})^j] / j)

against ``1 / det_m T(c~) T(b~)`` with ``b = v_- u_+^{-1}``, ``c = u_-^{-1} v_+``
and ``F_{n,k} = P_n T(c) Q_n (Q_n H(b) H(c~) Q_n)^k Q_n T(b) P_n``.
"""

from __future__ import annotations

import cmath
import csv
import hashlib
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .besov import KreinParams, conjugation_number
from .determinants import (
    LogDet,
    det_regularized,
    det_trace_class,
    geometric_mean,
    toeplitz_determinant,
)
from .errors import NoConvergence, SingularMatrix, TruncationTooSmall
from .factorization import Factorization, compute_b_c, factorize_left, factorize_right
from .sections import hankel_matrix, hankel_window, product_section, toeplitz_window
from .symbol import FourierSymbol, invert, tilde

CSV_COLUMNS = ("n", "log_abs_Dn", "arg_Dn", "ratio_re", "ratio_im", "corrected_re",
               "corrected_im", "rhs_re", "rhs_im", "abs_error")
ENTRY_TOL = 1e-12
MAX_SECTION_BLOCKS = 1 << 12


def symbol_hash(a: FourierSymbol) -> str:
    h = hashlib.sha256()
    h.update(f"{a.N}:{a.lo}:{a.hi}:".encode())
    h.update(np.ascontiguousarray(a.coeffs).tobytes())
    return h.hexdigest()[:16]


# -- F_{n,k} -------------------------------------------------------------------

def _f_terms(b: FourierSymbol, c: FourierSymbol, n: int, kmax: int, M: int,
             until_zero: bool = False) -> list[np.ndarray]:
    """``F_{n,0..kmax}`` assembled on the ``M``-block model of ``H^2``.

    ``Q_n`` is represented by block indices ``n+1 .. M-1``.  ``H(b)`` has no
    nonzero columns beyond ``b.hi - 1``, so the inner sum of ``H(b) H(c~)`` is
    finite and exact.  With ``until_zero`` the list is extended past ``kmax``
    until a term vanishes to ``ENTRY_TOL``.
    """
    P = range(0, n + 1)
    Q = range(n + 1, max(M, n + 1))
    inner = range(0, max(0, b.hi))
    A = toeplitz_window(c, P, Q)
    B = toeplitz_window(b, Q, P)
    Hb = hankel_window(b, Q, inner)
    Hc = hankel_window(tilde(c), inner, Q)
    V = B
    terms = []
    k = 0
    while True:
        F = A @ V
        terms.append(F)
        k += 1
        if k > kmax:
            if not until_zero or not np.any(np.abs(F) > ENTRY_TOL) or k > 4096:
                break
        V = Hb @ (Hc @ V)
    return terms


def _needed_blocks(b: FourierSymbol, c: FourierSymbol, n: int, kmax: int) -> int:
    return n + (kmax + 2) * (b.bandwidth + c.bandwidth) + 2


def _checked_terms(b, c, n, kmax, M) -> list[np.ndarray]:
    coarse = _f_terms(b, c, n, kmax, M)
    fine = _f_terms(b, c, n, kmax, 2 * M)
    for k, (x, y) in enumerate(zip(coarse, fine)):
        if x.size and np.max(np.abs(x - y)) > ENTRY_TOL:
            raise TruncationTooSmall(
                f"F_{{{n},{k}}} changes by {np.max(np.abs(x - y)):.3g} when M doubles from {M}")
    return coarse


def f_nk(b: FourierSymbol, c: FourierSymbol, n: int, k: int, M: int | None = None) -> np.ndarray:
    """The ``(n+1)N``-square matrix of ``F_{n,k}``."""
    if k < 0 or n < 0:
        raise ValueError("n and k must be nonnegative")
    M = M or _needed_blocks(b, c, n, k)
    return _checked_terms(b, c, n, k, M)[k]


def correction_exponent(b: FourierSymbol, c: FourierSymbol, n: int, m: int,
                        M: int | None = None) -> complex:
    """``sum_{j=1}^{m-1} tr[(sum_{k=0}^{m-1} F_{n,k})^j] / j``; zero for ``m = 1``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    if m == 1:
        return 0j
    M = M or _needed_blocks(b, c, n, m - 1)
    S = sum(_checked_terms(b, c, n, m - 1, M))
    total = 0j
    Sj = np.eye(S.shape[0], dtype=complex)
    for j in range(1, m):
        Sj = Sj @ S
        total += np.trace(Sj) / j
    return complex(total)


def finite_section_identity(b: FourierSymbol, c: FourierSymbol, n: int,
                            M: int | None = None) -> complex:
    """``det(I - sum_k F_{n,k})`` with the ``k``-sum run to structural vanishing.

    Equals ``G(a)^{n+1} / D_n(a)`` for large enough ``n``.
    """
    M = M or _needed_blocks(b, c, n, 0)
    S = sum(_f_terms(b, c, n, 0, M, until_zero=True))
    return det_trace_class(-S)


# -- limits ----------------------------------------------------------------------

def _settle(evaluate, M: int, rtol: float, max_blocks: int = MAX_SECTION_BLOCKS) -> tuple[complex, int]:
    prev = evaluate(M)
    while 2 * M <= max_blocks:
        cur = evaluate(2 * M)
        M *= 2
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur, M
        prev = cur
    raise NoConvergence(f"section value did not settle up to {M} blocks", estimates=(prev, cur))


def rhs_regularized(b: FourierSymbol, c: FourierSymbol, m: int, M: int | None = None,
                    rtol: float = 1e-8) -> complex:
    """``det_m T(c~) T(b~)`` from growing exact sections of the operator product."""
    ct, bt = tilde(c), tilde(b)
    N = b.N

    def value(blocks):
        K = product_section(ct, bt, blocks) - np.eye(blocks * N)
        return det_regularized(K, m)

    start = M or 2 * (b.bandwidth + c.bandwidth) + 2
    return _settle(value, start, rtol)[0]


def szego_widom_constant(a: FourierSymbol, a_inv: FourierSymbol | None = None,
                         rtol: float = 1e-12) -> complex:
    """``det T(a) T(a^{-1}) = det(I - H(a) H(a~^{-1}))`` on growing Hankel sections."""
    a_inv = a_inv if a_inv is not None else invert(a)
    inv_t = tilde(a_inv)
    N = a.N

    def value(blocks):
        K = hankel_matrix(a, blocks, blocks) @ hankel_matrix(inv_t, blocks, blocks)
        return det_trace_class(-K)

    return _settle(value, max(4, a.bandwidth + 1), rtol)[0]


# -- reports ---------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    n: int
    logdet: LogDet
    ratio: complex
    corrected_ratio: complex
    rhs: complex

    @property
    def abs_error(self) -> float:
        return abs(self.corrected_ratio - self.rhs)


@dataclass
class ScanReport:
    rows: list[ScanRow]
    metadata: dict = field(default_factory=dict)

    def errors(self) -> np.ndarray:
        return np.array([r.abs_error for r in self.rows])

    def first_within(self, tol: float) -> int | None:
        for r in self.rows:
            if r.abs_error <= tol:
                return r.n
        return None

    def trend_slope(self, n_from: int | None = None, n_to: int | None = None) -> float:
        """Least-squares slope of ``log(abs_error)`` against ``n``."""
        rows = [r for r in self.rows
                if (n_from is None or r.n >= n_from) and (n_to is None or r.n <= n_to)]
        ns = np.array([r.n for r in rows], dtype=float)
        logs = np.log(np.maximum([r.abs_error for r in rows], 1e-300))
        return float(np.polyfit(ns, logs, 1)[0])

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            vals = [r.logdet.log_modulus, r.logdet.phase, r.ratio.real, r.ratio.imag,
                    r.corrected_ratio.real, r.corrected_ratio.imag, r.rhs.real, r.rhs.imag,
                    r.abs_error]
            w.writerow([r.n] + [f"{v:.16e}" for v in vals])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _ordered_map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _ratio(ld: LogDet, log_g: complex, n: int) -> complex:
    return cmath.exp(ld.log - (n + 1) * log_g)


def szego_widom_scan(a: FourierSymbol, n_max: int, tol: float = 1e-6, n_min: int = 0,
                     jobs: int = 1, G: complex | None = None) -> ScanReport:
    """Rows of ``D_n / G^{n+1}`` against ``det T(a) T(a^{-1})`` for ``n_min <= n <= n_max``."""
    a_inv = invert(a)
    G = geometric_mean(a) if G is None else G
    log_g = cmath.log(G)
    rhs = szego_widom_constant(a, a_inv)

    def row(n):
        try:
            ld = toeplitz_determinant(a, n)
        except SingularMatrix:
            return n, None
        r = _ratio(ld, log_g, n)
        return n, ScanRow(n, ld, r, r, rhs)

    results = _ordered_map(row, range(n_min, n_max + 1), jobs)
    rows = [r for _, r in results if r is not None]
    report = ScanReport(rows, {
        "scan": "szego",
        "symbol_hash": symbol_hash(a),
        "block_size": a.N,
        "n_range": [n_min, n_max],
        "tol": tol,
        "geometric_mean": [G.real, G.imag],
        "rhs": [rhs.real, rhs.imag],
        "inverse_tail_bound": a_inv.tail_bound,
        "singular_n": [n for n, r in results if r is None],
    })
    report.metadata["first_within_tol"] = report.first_within(tol)
    return report


def higher_order_scan(a: FourierSymbol, params: KreinParams | None, n_max: int,
                      M: int | None = None, *, force_m: int | None = None, n_min: int = 0,
                      tol: float = 1e-10, jobs: int = 1, right: Factorization | None = None,
                      left: Factorization | None = None, G: complex | None = None) -> ScanReport:
    """Rows of the ``m``-corrected ratio against ``1 / det_m T(c~) T(b~)``.

    ``m`` comes from the conjugation number of ``params`` unless ``force_m``
    is given.  Precomputed factorizations may be passed in; they are used as is.
    """
    if force_m is not None:
        m, lam = int(force_m), None
    elif params is not None:
        lam, m = conjugation_number(params)
    else:
        raise ValueError("either params or force_m is required")
    if m < 1:
        raise ValueError("m must be a positive integer")
    right = right or factorize_right(a, tol)
    left = left or factorize_left(a, tol)
    b, c = compute_b_c(right, left)
    G = geometric_mean(a) if G is None else G
    log_g = cmath.log(G)
    rhs = 1.0 / rhs_regularized(b, c, m)

    def row(n):
        try:
            ld = toeplitz_determinant(a, n)
        except SingularMatrix:
            return n, None
        r = _ratio(ld, log_g, n)
        Mn = M or _needed_blocks(b, c, n, m - 1)
        corr = r * cmath.exp(-correction_exponent(b, c, n, m, Mn))
        return n, ScanRow(n, ld, r, corr, rhs)

    results = _ordered_map(row, range(n_min, n_max + 1), jobs)
    rows = [r for _, r in results if r is not None]
    report = ScanReport(rows, {
        "scan": "higher-order",
        "symbol_hash": symbol_hash(a),
        "block_size": a.N,
        "n_range": [n_min, n_max],
        "m": m,
        "conjugation_number": lam,
        "params": None if params is None else {
            "p": params.p, "q": params.q, "alpha": params.alpha, "beta": params.beta},
        "factorization_tol": tol,
        "right_residual": right.residual,
        "left_residual": left.residual,
        "b_bandwidth": b.bandwidth,
        "c_bandwidth": c.bandwidth,
        "big_m": M,
        "truncation_entry_tol": ENTRY_TOL,
        "geometric_mean": [G.real, G.imag],
        "rhs": [rhs.real, rhs.imag],
        "singular_n": [n for n, r in results if r is None],
    })
    if len(rows) >= 2:
        report.metadata["trend_slope"] = report.trend_slope()
    return report
