"""Matrix-valued symbols on the unit circle stored by their Fourier coefficients.

A symbol ``a`` with block size ``N`` is kept as a contiguous stack of ``N x N``
coefficients ``a_k`` for ``k = lo, ..., hi``; everything outside that window is
zero.  Circle integrals use the normalized measure ``dtheta / 2pi``, so
``a_k = (1/2pi) \\int a(e^{i theta}) e^{-ik theta} d theta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    GridTooCoarse,
    NoConvergence,
    SingularSymbol,
)

DROP_THRESHOLD = 1e-14
MIN_GRID = 64
MAX_GRID = 1 << 16
SINGULAR_DET_RTOL = 1e-12


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def default_grid(bandwidth: int) -> int:
    """Smallest admissible power-of-two grid for a symbol of the given bandwidth."""
    return max(MIN_GRID, _next_pow2(4 * max(bandwidth, 1)))


def _block_norms(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.shape[0] == 0:
        return np.zeros(0)
    if coeffs.shape[1] == 1:
        return np.abs(coeffs[:, 0, 0])
    return np.linalg.norm(coeffs, ord=2, axis=(1, 2))


@dataclass(frozen=True, eq=False)
class FourierSymbol:
    """Band-limited matrix symbol.

    Use :func:`symbol_from_coefficients` or the arithmetic methods to build
    instances; the constructor expects an already canonical coefficient stack.
    """

    lo: int
    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        c = self.coeffs
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[1] < 1:
            raise DimensionMismatch(f"coefficient stack must be (L, N, N), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("symbol coefficients must be finite")
        if self.tail_bound < 0:
            raise DomainError("tail_bound must be nonnegative")
        c.flags.writeable = False

    # -- structure -------------------------------------------------------
    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def bandwidth(self) -> int:
        return max(abs(self.lo), abs(self.hi))

    @property
    def is_scalar(self) -> bool:
        return self.N == 1

    def coeff(self, k: int) -> np.ndarray:
        i = k - self.lo
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i]
        return np.zeros((self.N, self.N), dtype=complex)

    def items(self) -> Iterator[tuple[int, np.ndarray]]:
        """Nonzero coefficients as ``(k, a_k)`` pairs in increasing ``k``."""
        for i, block in enumerate(self.coeffs):
            if np.any(block):
                yield self.lo + i, block

    def coeff_array(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients ``a_lo .. a_hi`` as an ``(hi-lo+1, N, N)`` array, zero padded."""
        out = np.zeros((hi - lo + 1, self.N, self.N), dtype=complex)
        s, e = max(lo, self.lo), min(hi, self.hi)
        if s <= e:
            out[s - lo:e - lo + 1] = self.coeffs[s - self.lo:e - self.lo + 1]
        return out

    def wiener_norm(self) -> float:
        """Sum of spectral norms of the coefficients."""
        return float(np.sum(_block_norms(self.coeffs)))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other, self.N))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, -_coerce(other, self.N))

    def __rsub__(self, other):
        return add(_coerce(other, self.N), -self)

    def __neg__(self):
        return FourierSymbol(self.lo, -self.coeffs, self.tail_bound)

    def __mul__(self, other):
        if isinstance(other, FourierSymbol):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, FourierSymbol):
            return multiply(other, self)
        return self.scale(other)

    def scale(self, c) -> "FourierSymbol":
        c = complex(c)
        return _canonical(self.lo, self.coeffs * c, self.tail_bound * abs(c))

    def __call__(self, theta) -> np.ndarray:
        """Values ``a(e^{i theta})`` as an ``(len(theta), N, N)`` array."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ks = np.arange(self.lo, self.hi + 1)
        phases = np.exp(1j * np.outer(theta, ks))
        return np.einsum("tk,kij->tij", phases, self.coeffs)

    def allclose(self, other: "FourierSymbol", atol: float = 1e-12) -> bool:
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return bool(np.all(np.abs(self.coeff_array(lo, hi) - other.coeff_array(lo, hi)) <= atol))

    def __repr__(self):
        return f"FourierSymbol(N={self.N}, k={self.lo}..{self.hi}, tail_bound={self.tail_bound:.3g})"


def _canonical(lo: int, coeffs: np.ndarray, tail: float = 0.0) -> FourierSymbol:
    coeffs = np.array(coeffs, dtype=complex, copy=True)
    norms = _block_norms(coeffs)
    peak = norms.max() if norms.size else 0.0
    if peak > 0:
        small = norms < DROP_THRESHOLD * peak
        tail += float(norms[small].sum())
        coeffs[small] = 0
        keep = np.flatnonzero(~small)
        first, last = keep[0], keep[-1]
        return FourierSymbol(lo + int(first), coeffs[first:last + 1], tail)
    n = coeffs.shape[1] if coeffs.ndim == 3 else 1
    return FourierSymbol(0, np.zeros((1, n, n), dtype=complex), tail)


def _coerce(x, N: int) -> FourierSymbol:
    if isinstance(x, FourierSymbol):
        if x.N != N:
            raise DimensionMismatch(f"block sizes differ: {x.N} vs {N}")
        return x
    return constant(np.eye(N) * complex(x))


def constant(value, N: int | None = None) -> FourierSymbol:
    """Constant symbol; ``value`` is a scalar (times identity) or an ``N x N`` matrix."""
    m = np.asarray(value, dtype=complex)
    if m.ndim == 0:
        m = np.eye(N or 1, dtype=complex) * m
    return _canonical(0, m[None])


def monomial(k: int, N: int = 1) -> FourierSymbol:
    """``chi_k(t) = t^k`` times the identity block."""
    return _canonical(k, np.eye(N, dtype=complex)[None])


def symbol_from_coefficients(coeffs: Mapping[int, object] | Iterable[tuple[int, object]],
                             N: int = 1, tail_bound: float = 0.0) -> FourierSymbol:
    """Build a canonical symbol from ``{k: a_k}`` with each ``a_k`` an ``N x N`` block.

    Scalars are accepted for ``N == 1``.
    """
    pairs = list(coeffs.items()) if isinstance(coeffs, Mapping) else list(coeffs)
    if not pairs:
        return FourierSymbol(0, np.zeros((1, N, N), dtype=complex), float(tail_bound))
    blocks = {}
    for k, block in pairs:
        m = np.asarray(block, dtype=complex)
        if m.ndim == 0 and N == 1:
            m = m.reshape(1, 1)
        if m.shape != (N, N):
            raise DimensionMismatch(f"coefficient at k={k} has shape {m.shape}, expected {(N, N)}")
        if not np.all(np.isfinite(m)):
            raise DomainError(f"coefficient at k={k} is not finite")
        blocks[int(k)] = blocks.get(int(k), 0) + m
    lo, hi = min(blocks), max(blocks)
    stack = np.zeros((hi - lo + 1, N, N), dtype=complex)
    for k, m in blocks.items():
        stack[k - lo] = m
    return _canonical(lo, stack, float(tail_bound))


# -- algebra -----------------------------------------------------------------

def add(a: FourierSymbol, b: FourierSymbol) -> FourierSymbol:
    if a.N != b.N:
        raise DimensionMismatch(f"block sizes differ: {a.N} vs {b.N}")
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return _canonical(lo, a.coeff_array(lo, hi) + b.coeff_array(lo, hi),
                      a.tail_bound + b.tail_bound)


def multiply(a: FourierSymbol, b: FourierSymbol) -> FourierSymbol:
    """Cauchy product ``(ab)_k = sum_j a_j b_{k-j}`` (matrix order preserved)."""
    if a.N != b.N:
        raise DimensionMismatch(f"block sizes differ: {a.N} vs {b.N}")
    La, Lb = a.coeffs.shape[0], b.coeffs.shape[0]
    out = np.zeros((La + Lb - 1, a.N, a.N), dtype=complex)
    if a.N == 1:
        out[:, 0, 0] = np.convolve(a.coeffs[:, 0, 0], b.coeffs[:, 0, 0])
    else:
        for i in range(La):
            out[i:i + Lb] += a.coeffs[i] @ b.coeffs
    tail = a.wiener_norm() * b.tail_bound + a.tail_bound * b.wiener_norm()
    return _canonical(a.lo + b.lo, out, tail)


def power(a: FourierSymbol, n: int, **invert_kw) -> FourierSymbol:
    if n < 0:
        return power(invert(a, **invert_kw), -n)
    result = constant(1.0, a.N)
    base = a
    while n:
        if n & 1:
            result = multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


def tilde(a: FourierSymbol) -> FourierSymbol:
    """Flip ``a(t) -> a(1/t)``: coefficients ``a_k -> a_{-k}``."""
    return FourierSymbol(-a.hi, a.coeffs[::-1].copy(), a.tail_bound)


def riesz_project(a: FourierSymbol, part: str) -> FourierSymbol:
    """``P`` keeps ``k >= 0``, ``Q`` keeps ``k < 0``."""
    part = part.upper()
    if part == "P":
        lo, hi = max(a.lo, 0), max(a.hi, 0)
    elif part == "Q":
        lo, hi = min(a.lo, -1), min(a.hi, -1)
    else:
        raise DomainError(f"unknown projection {part!r}; expected 'P' or 'Q'")
    if (part == "P" and a.hi < 0) or (part == "Q" and a.lo >= 0):
        return constant(0.0, a.N)
    return _canonical(lo, a.coeff_array(lo, hi))


def harmonic_extension(a: FourierSymbol, r: float, theta: float) -> np.ndarray:
    if not 0 <= r < 1:
        raise DomainError(f"radius must lie in [0, 1), got {r}")
    ks = np.arange(a.lo, a.hi + 1)
    w = (float(r) ** np.abs(ks)) * np.exp(1j * ks * theta)
    return np.einsum("k,kij->ij", w, a.coeffs)


# -- grids -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridSamples:
    """Values of a symbol at ``theta_j = 2 pi j / M``."""

    M: int
    values: np.ndarray

    def __post_init__(self):
        if self.M < 1 or self.M & (self.M - 1):
            raise DomainError(f"grid size must be a power of two, got {self.M}")
        if self.values.shape[0] != self.M:
            raise DimensionMismatch("values do not match grid size")

    @property
    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    def to_symbol(self) -> FourierSymbol:
        c = np.fft.fft(self.values, axis=0) / self.M
        c = np.fft.fftshift(c, axes=0)
        return _canonical(-self.M // 2, c)


def sample(a: FourierSymbol, M: int) -> GridSamples:
    if M <= a.hi - a.lo:
        raise DomainError(f"grid of size {M} aliases a symbol spanning {a.lo}..{a.hi}")
    buf = np.zeros((M, a.N, a.N), dtype=complex)
    idx = np.arange(a.lo, a.hi + 1) % M
    np.add.at(buf, idx, a.coeffs)
    return GridSamples(M, np.fft.ifft(buf, axis=0) * M)


def _check_dets(dets: np.ndarray) -> None:
    mags = np.abs(dets)
    if mags.max() == 0 or mags.min() < SINGULAR_DET_RTOL * mags.max():
        raise SingularSymbol(
            f"det of symbol nearly vanishes on the grid (min |det| = {mags.min():.3g}, "
            f"max |det| = {mags.max():.3g})")


def invert(a: FourierSymbol, grid_M: int | None = None, tol: float = 1e-12,
           max_grid: int = MAX_GRID) -> FourierSymbol:
    """Inverse symbol via pointwise inversion on a grid and the DFT.

    The grid doubles until ``||a * s - 1||_W <= tol``.
    """
    M = grid_M or default_grid(a.bandwidth)
    M = max(M, _next_pow2(a.hi - a.lo + 1))
    one = constant(1.0, a.N)
    history = []
    while True:
        g = sample(a, M)
        _check_dets(np.linalg.det(g.values))
        s = GridSamples(M, np.linalg.inv(g.values)).to_symbol()
        residual = (multiply(a, s) - one).wiener_norm()
        history.append(residual)
        if residual <= tol:
            tail = s.tail_bound + residual * s.wiener_norm()
            return FourierSymbol(s.lo, s.coeffs, tail)
        if M >= max_grid:
            raise NoConvergence(
                f"inverse residual {residual:.3g} above tol {tol:.3g} at grid {M}",
                estimates=history[-2:])
        M *= 2


def winding_number(a: FourierSymbol, grid_M: int | None = None, max_grid: int = 1 << 20) -> int:
    """Winding number of ``det a`` about the origin."""
    M = grid_M or default_grid(a.bandwidth)
    M = max(M, _next_pow2(a.hi - a.lo + 1))
    while True:
        dets = np.linalg.det(sample(a, M).values)
        _check_dets(dets)
        steps = np.angle(np.roll(dets, -1) / dets)
        if np.max(np.abs(steps)) < np.pi / 2:
            return int(round(steps.sum() / (2 * np.pi)))
        if M >= max_grid:
            raise GridTooCoarse(f"argument of det a still jumps by >= pi/2 at grid {M}")
        M *= 2


# -- coefficient documents ---------------------------------------------------

def symbol_to_document(a: FourierSymbol) -> dict:
    return {
        "N": a.N,
        "tail_bound": a.tail_bound,
        "coefficients": [
            {"k": k, "re": block.real.tolist(), "im": block.imag.tolist()}
            for k, block in a.items()
        ],
    }


def symbol_from_document(doc: Mapping) -> FourierSymbol:
    N = int(doc["N"])
    pairs = []
    for entry in doc["coefficients"]:
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        pairs.append((int(entry["k"]), (re + 1j * im).reshape(N, N)))
    return symbol_from_coefficients(pairs, N, float(doc.get("tail_bound", 0.0)))


def load_symbol(path) -> FourierSymbol:
    return symbol_from_document(json.loads(Path(path).read_text()))


def save_symbol(a: FourierSymbol, path) -> None:
    Path(path).write_text(json.dumps(symbol_to_document(a), indent=1))
