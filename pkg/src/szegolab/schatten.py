"""Singular values and Schatten-von Neumann norms of Hankel sections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError
from .sections import SectionMatrix, hankel_section, hankel_tilde_section
from .symbol import FourierSymbol


@dataclass(frozen=True)
class SingularSpectrum:
    values: tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise DomainError("singular values must be nonnegative and nonincreasing")

    def norm(self, p: float) -> float:
        return _norm_from_values(np.asarray(self.values), p)


def _as_array(K) -> np.ndarray:
    return np.asarray(K.data if isinstance(K, SectionMatrix) else K)


def singular_spectrum(K) -> SingularSpectrum:
    A = _as_array(K)
    if A.size == 0:
        return SingularSpectrum(())
    s = scipy.linalg.svd(A, compute_uv=False, lapack_driver="gesdd")
    return SingularSpectrum(tuple(float(x) for x in np.maximum(s, 0.0)))


def _norm_from_values(s: np.ndarray, p: float) -> float:
    if p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    if s.size == 0:
        return 0.0
    if math.isinf(p):
        return float(s.max())
    top = s.max()
    if top == 0:
        return 0.0
    # scaled sum avoids overflow for large p
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def schatten_norm(K, p: float) -> float:
    """``(sum_n s_n^p)^{1/p}``; ``p = inf`` gives the operator norm."""
    return singular_spectrum(K).norm(p)


def hilbert_schmidt_hankel_exact(a: FourierSymbol) -> float:
    """Hilbert-Schmidt norm of ``H(a)``: ``sqrt(sum_{k>=1} k ||a_k||_F^2)``."""
    total = 0.0
    for k, blk in a.items():
        if k >= 1:
            total += k * float(np.sum(np.abs(blk) ** 2))
    return math.sqrt(total)


def schatten_scan(a: FourierSymbol, p: float, sizes: Sequence[int],
                  tilde_side: bool = False) -> list[tuple[int, float]]:
    """Schatten ``p``-norms of the leading ``size x size`` block Hankel sections.

    With ``tilde_side`` the sections of ``H(a~)`` are scanned instead.
    """
    if list(sizes) != sorted(set(sizes)):
        raise DomainError("sizes must be strictly increasing")
    make = hankel_tilde_section if tilde_side else hankel_section
    return [(int(n), schatten_norm(make(a, n, n), p)) for n in sizes]


def peller_ratio(a: FourierSymbol, q: float, size: int | None = None) -> dict:
    """Empirical ratio ``||H(a)||_{C_q} / ||Pa||_{B_q^{1/q}}``.

    Reported for inspection only; the equivalence constants are not known
    quantitatively, so no bound is asserted.
    """
    from .besov import besov_norm
    from .symbol import riesz_project

    n = size or max(a.hi, 1)
    hank = schatten_norm(hankel_section(a, n, n), q)
    besov = besov_norm(riesz_project(a, "P"), q, 1.0 / q)
    return {"q": q, "size": n, "hankel_schatten": hank, "besov_norm": besov,
            "ratio": hank / besov if besov > 0 else float("nan")}
