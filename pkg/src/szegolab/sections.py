"""Finite Toeplitz and Hankel sections of (block) symbols."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io

from .errors import DimensionMismatch, DomainError
from .symbol import FourierSymbol, tilde

MAX_DIM = 4096


@dataclass(frozen=True, eq=False)
class SectionMatrix:
    """Dense matrix with block size ``N``; ``n`` is the section index."""

    data: np.ndarray
    n: int
    N: int

    def __post_init__(self):
        r, c = self.data.shape
        if r % self.N or c % self.N:
            raise DimensionMismatch(f"shape {self.data.shape} is not a multiple of block size {self.N}")
        self.data.flags.writeable = False

    @property
    def shape(self):
        return self.data.shape

    def block(self, j: int, k: int) -> np.ndarray:
        N = self.N
        return self.data[j * N:(j + 1) * N, k * N:(k + 1) * N]


def _assemble(a: FourierSymbol, idx: np.ndarray) -> np.ndarray:
    """Block matrix whose ``(j, k)`` block is ``a_{idx[j, k]}``."""
    rows, cols = idx.shape
    N = a.N
    lo, hi = int(idx.min()), int(idx.max())
    table = a.coeff_array(lo, hi)
    blocks = table[idx - lo]
    return blocks.transpose(0, 2, 1, 3).reshape(rows * N, cols * N)


def toeplitz_matrix(a: FourierSymbol, rows: int, cols: int | None = None) -> np.ndarray:
    """Dense ``rows x cols`` block array with blocks ``a_{j-k}``."""
    cols = rows if cols is None else cols
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    return _assemble(a, j - k)


def hankel_matrix(a: FourierSymbol, rows: int, cols: int) -> np.ndarray:
    """Dense block array of ``H(a)``: blocks ``a_{j+k+1}``."""
    j = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    return _assemble(a, j + k + 1)


def _check_size(dim: int) -> None:
    if dim > MAX_DIM:
        raise DomainError(f"section dimension {dim} exceeds the configured cap {MAX_DIM}")


def toeplitz_window(a: FourierSymbol, rows: range, cols: range) -> np.ndarray:
    """Blocks ``a_{j-k}`` of ``T(a)`` for ``j in rows``, ``k in cols``."""
    j = np.asarray(rows)[:, None]
    k = np.asarray(cols)[None, :]
    if j.size == 0 or k.size == 0:
        return np.zeros((j.size * a.N, k.size * a.N), dtype=complex)
    return _assemble(a, j - k)


def hankel_window(a: FourierSymbol, rows: range, cols: range) -> np.ndarray:
    """Blocks ``a_{j+k+1}`` of ``H(a)`` for ``j in rows``, ``k in cols``."""
    j = np.asarray(rows)[:, None]
    k = np.asarray(cols)[None, :]
    if j.size == 0 or k.size == 0:
        return np.zeros((j.size * a.N, k.size * a.N), dtype=complex)
    return _assemble(a, j + k + 1)


def toeplitz_section(a: FourierSymbol, n: int) -> SectionMatrix:
    """``T_n(a) = (a_{j-k})_{j,k=0}^n``, an ``(n+1)N`` square matrix."""
    if n < 0:
        raise DomainError("section index must be nonnegative")
    _check_size((n + 1) * a.N)
    return SectionMatrix(toeplitz_matrix(a, n + 1), n, a.N)


def hankel_section(a: FourierSymbol, rows: int, cols: int) -> SectionMatrix:
    if rows < 1 or cols < 1:
        raise DomainError("Hankel section needs at least one block row and column")
    _check_size(max(rows, cols) * a.N)
    return SectionMatrix(hankel_matrix(a, rows, cols), rows - 1, a.N)


def hankel_tilde_section(a: FourierSymbol, rows: int, cols: int) -> SectionMatrix:
    """Section of ``H(a~)``: blocks ``a_{-j-k-1}``."""
    return hankel_section(tilde(a), rows, cols)


def product_section(a: FourierSymbol, b: FourierSymbol, M: int) -> np.ndarray:
    """Exact ``M``-block section of the infinite product ``T(a) T(b)``.

    The inner summation runs over as many blocks as ``a``'s negative
    coefficients can reach, so no edge truncation enters.
    """
    inner = M + max(0, -a.lo)
    return toeplitz_matrix(a, M, inner) @ toeplitz_matrix(b, inner, M)


def operator_identity_residual(a: FourierSymbol, a_inv: FourierSymbol, M: int) -> float:
    """Spectral norm of the top-left corner of ``I - T(a)T(a^-1) - H(a)H(a~^-1)``.

    Assembled on ``M``-block sections; only the leading ``M/2`` blocks are
    inspected since the lower-right corner carries finite-section edge effects.
    """
    N = a.N
    Ta = toeplitz_matrix(a, M)
    Tinv = toeplitz_matrix(a_inv, M)
    Ha = hankel_matrix(a, M, M)
    Hinv = hankel_matrix(tilde(a_inv), M, M)
    R = np.eye(M * N) - Ta @ Tinv - Ha @ Hinv
    h = (M // 2) * N
    return float(np.linalg.norm(R[:h, :h], 2))


def write_matrix_market(section: SectionMatrix, path) -> None:
    scipy.io.mmwrite(str(path), np.asarray(section.data),
                     comment=f"section n={section.n} N={section.N}")


def read_matrix_market(path, n: int, N: int) -> SectionMatrix:
    return SectionMatrix(np.array(scipy.io.mmread(str(path)), dtype=complex), n, N)
