"""Overflow-safe section determinants, geometric means and regularized determinants."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigenFailure, NoConvergence, SingularMatrix, WindingNonzero
from .sections import SectionMatrix, toeplitz_section
from .symbol import FourierSymbol, default_grid, winding_number

PIVOT_FLOOR = 1e-300


def _wrap(phase: float) -> float:
    """Reduce an angle to ``(-pi, pi]``."""
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class LogDet:
    """``det = exp(log_modulus + i phase)``."""

    log_modulus: float
    phase: float

    @property
    def value(self) -> complex:
        return cmath.exp(complex(self.log_modulus, self.phase))

    @property
    def log(self) -> complex:
        return complex(self.log_modulus, self.phase)


def log_det(matrix) -> LogDet:
    """Determinant via LU with partial pivoting, accumulated in log form."""
    A = np.asarray(matrix.data if isinstance(matrix, SectionMatrix) else matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"log_det needs a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        return LogDet(0.0, 0.0)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    diag = np.diag(lu)
    mags = np.abs(diag)
    if mags.min() < PIVOT_FLOOR:
        raise SingularMatrix(f"LU pivot of magnitude {mags.min():.3g}")
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    phase = math.pi * (swaps % 2)
    for d in diag:
        phase = _wrap(phase + cmath.phase(d))
    return LogDet(float(np.sum(np.log(mags))), phase)


def toeplitz_determinant(a: FourierSymbol, n: int) -> LogDet:
    """``D_n(a)``, the determinant of ``T_n(a)``."""
    return log_det(toeplitz_section(a, n))


def _mean_log_det(a: FourierSymbol, r: float, M: int,
                  ref: float | None) -> tuple[complex, float] | None:
    """Mean of ``log det h_r a`` on an ``M``-point grid, or ``None`` if unwrapping fails.

    Also returns the branch of the argument used at ``theta = 0``.

    The branch at ``theta = 0`` is chosen closest to ``ref`` so that the
    result varies continuously in ``r``.
    """
    ks = np.arange(a.lo, a.hi + 1)
    weights = a.coeffs * (r ** np.abs(ks))[:, None, None]
    buf = np.zeros((M, a.N, a.N), dtype=complex)
    np.add.at(buf, ks % M, weights)
    vals = np.fft.ifft(buf, axis=0) * M
    dets = vals[:, 0, 0] if a.N == 1 else np.linalg.det(vals)
    if np.any(dets == 0):
        return None
    args = np.angle(dets)
    steps = np.diff(np.append(args, args[0]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    if np.max(np.abs(steps)) >= np.pi / 2:
        return None
    start = args[0]
    if ref is not None:
        start += 2 * np.pi * round((ref - start) / (2 * np.pi))
    unwrapped = start + np.concatenate(([0.0], np.cumsum(steps[:-1])))
    return complex(np.mean(np.log(np.abs(dets))), np.mean(unwrapped)), float(start)


def _mean_log_det_converged(a: FourierSymbol, r: float, M: int, tol: float,
                            max_grid: int, ref: float | None) -> tuple[complex, float, int]:
    prev = None
    while M <= max_grid:
        cur = _mean_log_det(a, r, M, ref)
        if cur is not None and prev is not None and abs(cur[0] - prev[0]) <= 0.1 * tol:
            return cur[0], cur[1], M // 2
        prev = cur
        M *= 2
    raise NoConvergence(f"theta quadrature of log det h_r a did not settle at r={r}")


def geometric_mean(a: FourierSymbol, tol: float = 1e-12, j_min: int = 3, j_max: int = 20,
                   max_grid: int = 1 << 18) -> complex:
    """``G(a) = lim_{r->1} exp(mean of log det h_r a)``.

    Radii ``r_j = 1 - 2^{-j}``; the limit is taken by Richardson
    extrapolation in powers of ``1 - r`` on the log scale.
    """
    w = winding_number(a)
    if w != 0:
        raise WindingNonzero(f"winding number of det a is {w}; G(a) needs index zero", winding=w)
    M = default_grid(a.bandwidth)
    table: list[list[complex]] = []
    ref = None
    best = None
    history = []
    for j in range(j_min, j_max + 1):
        r = 1.0 - 2.0 ** (-j)
        val, ref, M = _mean_log_det_converged(a, r, M, tol, max_grid, ref)
        row = [val]
        for i, prev in enumerate(table[-1] if table else []):
            factor = 2.0 ** (i + 1)
            row.append(row[i] + (row[i] - prev) / (factor - 1.0))
        table.append(row)
        est = row[-1]
        history.append(est)
        if best is not None and abs(est - best) < tol:
            return cmath.exp(est)
        best = est
    raise NoConvergence("Richardson extrapolation of G(a) did not settle",
                        estimates=[cmath.exp(x) for x in history[-2:]])


def _eigvals(K: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.eigvals(K)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigensolver failed: {exc}") from exc


def det_trace_class(K) -> complex:
    """``det(I + K) = prod (1 + lambda_j(K))`` from the full spectrum of ``K``."""
    K = np.asarray(K.data if isinstance(K, SectionMatrix) else K)
    if K.size == 0:
        return 1.0 + 0j
    return complex(np.prod(1.0 + _eigvals(K)))


def regularization_factor(K, m: int) -> complex:
    """``exp(sum_{j=1}^{m-1} (-1)^j tr(K^j) / j)``."""
    K = np.asarray(K.data if isinstance(K, SectionMatrix) else K)
    if m < 1:
        raise ValueError("m must be a positive integer")
    total = 0j
    P = np.eye(K.shape[0], dtype=complex)
    for j in range(1, m):
        P = P @ K
        total += (-1) ** j * np.trace(P) / j
    return cmath.exp(total)


def det_regularized(K, m: int) -> complex:
    """``det_m(I + K) = det(I + K) exp(sum_{j<m} (-1)^j tr(K^j)/j)``."""
    return det_trace_class(K) * regularization_factor(K, m)


def regularized_remainder(K, m: int) -> np.ndarray:
    """``R_m(K) = (I + K) exp(sum_{j<m} (-K)^j / j) - I`` by matrix exponential."""
    K = np.asarray(K.data if isinstance(K, SectionMatrix) else K, dtype=complex)
    I = np.eye(K.shape[0])
    S = np.zeros_like(K)
    P = I.astype(complex)
    for j in range(1, m):
        P = P @ (-K)
        S += P / j
    return (I + K) @ scipy.linalg.expm(S) - I


def is_invertible_by_det(K, m: int, rtol: float = 1e-10) -> bool:
    """Decide ``det_m(I + K) != 0`` relative to the scale ``||I + K||^d``."""
    K = np.asarray(K.data if isinstance(K, SectionMatrix) else K)
    d = K.shape[0]
    scale = np.linalg.norm(np.eye(d) + K, 2) ** d
    value = abs(det_regularized(K, m)) / abs(regularization_factor(K, m))
    return bool(value > rtol * scale)
