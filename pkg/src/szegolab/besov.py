"""Moduli of continuity, Besov seminorms and generalized Krein norms.

All ``L^p`` norms are taken with respect to ``dtheta / 2pi`` and evaluated
by the composite trapezoid rule on an equispaced grid.  Block symbols are
handled entrywise and the entry norms are combined by their maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParams, NoConvergence
from .symbol import FourierSymbol, default_grid, riesz_project, sample, symbol_from_coefficients

S_MIN = 2 * math.pi * 1e-8
S_MAX = 2 * math.pi
NODES_PER_DECADE = 64
MAX_NODES_PER_DECADE = 64 << 7
_EQ_TOL = 1e-12


def _grid_for(f: FourierSymbol, grid_M: int | None) -> int:
    M = grid_M or max(512, 4 * default_grid(f.bandwidth))
    if M & (M - 1):
        raise DomainError(f"grid size must be a power of two, got {M}")
    return M


def _scalar_coeffs(f: FourierSymbol) -> tuple[np.ndarray, np.ndarray]:
    if f.N != 1:
        raise DomainError("expected a scalar symbol")
    ks = np.arange(f.lo, f.hi + 1)
    return ks, f.coeffs[:, 0, 0]


def _difference_norms(f: FourierSymbol, hs: np.ndarray, order: int, p: float, M: int) -> np.ndarray:
    """``|| Delta_h^order f ||_{L^p}`` for every shift in ``hs``."""
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    ks, fk = _scalar_coeffs(f)
    hs = np.asarray(hs, dtype=float)
    phase = np.outer(hs, ks)
    if order == 1:
        mult = np.exp(1j * phase) - 1.0
    else:
        mult = 2.0 * np.cos(phase) - 2.0
    C = mult * fk[None, :]
    if p == 2 and M > ks[-1] - ks[0]:
        # trapezoid rule is exact for |trig poly|^2 on this grid
        return np.sqrt(np.sum(np.abs(C) ** 2, axis=1))
    thetas = 2 * np.pi * np.arange(M) / M
    E = np.exp(1j * np.outer(ks, thetas))
    out = np.empty(hs.size)
    chunk = max(1, (1 << 22) // M)
    for s in range(0, hs.size, chunk):
        vals = np.abs(C[s:s + chunk] @ E)
        if math.isinf(p):
            out[s:s + chunk] = vals.max(axis=1)
        else:
            out[s:s + chunk] = np.mean(vals ** p, axis=1) ** (1.0 / p)
    return out


def _entrywise_max(f: FourierSymbol, fn) -> float:
    if f.N == 1:
        return fn(f)
    best = 0.0
    for i in range(f.N):
        for j in range(f.N):
            entry = symbol_from_coefficients(
                [(k, blk[i, j]) for k, blk in f.items()] or [(0, 0.0)], 1)
            best = max(best, fn(entry))
    return best


def lp_norm(f: FourierSymbol, p: float, grid_M: int | None = None) -> float:
    """``||f||_{L^p}`` under ``dtheta/2pi`` (entrywise max for blocks)."""
    def scalar(g):
        vals = np.abs(sample(g, _grid_for(g, grid_M)).values[:, 0, 0])
        if math.isinf(p):
            return float(vals.max())
        return float(np.mean(vals ** p) ** (1.0 / p))
    return _entrywise_max(f, scalar)


def sup_norm(a: FourierSymbol, grid_M: int | None = None) -> float:
    """Grid maximum of the spectral norm of ``a(e^{i theta})``."""
    vals = sample(a, _grid_for(a, grid_M)).values
    if a.N == 1:
        return float(np.abs(vals).max())
    return float(np.linalg.norm(vals, ord=2, axis=(1, 2)).max())


def modulus_of_continuity(f: FourierSymbol, order: int, s: float, p: float = 2.0,
                          grid_M: int | None = None) -> float:
    """``omega^order_{L^p}(f, s)`` with the sup over shifts ``2 pi j / M <= s``.

    Shifts and their negatives give equal norms, so only ``h >= 0`` is scanned.
    """
    if s < 0:
        raise DomainError(f"s must be nonnegative, got {s}")

    def scalar(g):
        M = _grid_for(g, grid_M)
        jmax = min(M // 2, int(math.floor(s * M / (2 * math.pi) + 1e-12)))
        hs = 2 * np.pi * np.arange(jmax + 1) / M
        return float(_difference_norms(g, hs, order, p, M).max())
    return _entrywise_max(f, scalar)


def _seminorm_estimate(f: FourierSymbol, p: float, alpha: float, order: int,
                       M: int, per_decade: int) -> float:
    decades = math.log10(S_MAX / S_MIN)
    n = int(round(decades * per_decade)) + 1
    nodes = np.logspace(math.log10(S_MIN), math.log10(S_MAX), n)
    shifts = 2 * np.pi * np.arange(M // 2 + 1) / M
    hs = np.union1d(nodes, shifts)
    g = np.maximum.accumulate(_difference_norms(f, hs, order, p, M))
    omega = g[np.searchsorted(hs, nodes)]
    integrand = (nodes ** (-alpha) * omega) ** p
    du = math.log(nodes[1] / nodes[0])
    body = du * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    # omega ~ s^order near zero for trigonometric polynomials
    head = integrand[0] / ((order - alpha) * p)
    return float(body + head)


def besov_seminorm(f: FourierSymbol, p: float, alpha: float, grid_M: int | None = None,
                   rtol: float = 1e-6) -> float:
    """``|f|_{B_p^alpha}``: ``omega^1`` for ``alpha < 1``, ``omega^2`` for ``alpha = 1``.

    Log-spaced trapezoid quadrature on ``(2 pi 1e-8, 2 pi]``, node density
    doubled until successive estimates agree to ``rtol``.
    """
    if not 1 <= p < math.inf:
        raise DomainError(f"p must lie in [1, inf), got {p}")
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    order = 2 if alpha >= 1 else 1

    def scalar(g):
        if np.allclose(g.coeffs[:, 0, 0] * (np.arange(g.lo, g.hi + 1) != 0), 0):
            return 0.0
        M = _grid_for(g, grid_M)
        per_decade = NODES_PER_DECADE
        prev = _seminorm_estimate(g, p, alpha, order, M, per_decade)
        while per_decade < MAX_NODES_PER_DECADE:
            per_decade *= 2
            cur = _seminorm_estimate(g, p, alpha, order, M, per_decade)
            if abs(cur - prev) <= rtol * abs(cur):
                return cur ** (1.0 / p)
            prev = cur
        raise NoConvergence("Besov quadrature did not settle",
                            estimates=(prev ** (1.0 / p), cur ** (1.0 / p)))
    return _entrywise_max(f, scalar)


def besov_norm(f: FourierSymbol, p: float, alpha: float, grid_M: int | None = None) -> float:
    """``||f||_{L^p} + |f|_{B_p^alpha}`` (entrywise max for blocks)."""
    return _entrywise_max(
        f, lambda g: lp_norm(g, p, grid_M) + besov_seminorm(g, p, alpha, grid_M))


@dataclass(frozen=True)
class KreinParams:
    """Parameters of a generalized Krein algebra.

    ``q``/``beta`` absent selects ``K_{p,0}^{alpha,0}``; ``p``/``alpha``
    absent selects ``K_{0,q}^{0,beta}``; all four give ``K_{p,q}^{alpha,beta}``.
    """

    p: float | None = None
    q: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        has_p = self.p is not None or self.alpha is not None
        has_q = self.q is not None or self.beta is not None
        if not (has_p or has_q):
            raise InvalidParams("at least one of (p, alpha) or (q, beta) is required")
        if has_p:
            if self.p is None or self.alpha is None:
                raise InvalidParams("p and alpha must be given together")
            if not 1 < self.p < math.inf or not 0 < self.alpha < 1:
                raise InvalidParams(f"need 1 < p < inf and 0 < alpha < 1, got p={self.p}, alpha={self.alpha}")
        if has_q:
            if self.q is None or self.beta is None:
                raise InvalidParams("q and beta must be given together")
            if not 1 < self.q < math.inf or not 0 < self.beta < 1:
                raise InvalidParams(f"need 1 < q < inf and 0 < beta < 1, got q={self.q}, beta={self.beta}")
        if has_p and not has_q and self.alpha < 1 / self.p - _EQ_TOL:
            raise InvalidParams("K_{p,0}^{alpha,0} is an algebra only for alpha >= 1/p")
        if has_q and not has_p and self.beta < 1 / self.q - _EQ_TOL:
            raise InvalidParams("K_{0,q}^{0,beta} is an algebra only for beta >= 1/q")
        if has_p and has_q:
            ap = self.alpha - 1 / self.p
            bq = self.beta - 1 / self.q
            if not (ap > _EQ_TOL or bq > _EQ_TOL or (abs(ap) <= _EQ_TOL and abs(bq) <= _EQ_TOL)):
                raise InvalidParams(
                    "K_{p,q}^{alpha,beta} needs alpha > 1/p, or beta > 1/q, or alpha = 1/p and beta = 1/q")

    @property
    def variant(self) -> str:
        if self.q is None:
            return "p0"
        if self.p is None:
            return "0q"
        return "pq"

    @property
    def lam(self) -> float:
        return conjugation_number(self)[0]

    @property
    def m(self) -> int:
        return conjugation_number(self)[1]


def conjugation_number(params: KreinParams) -> tuple[float, int]:
    """Conjugation number ``lambda`` and the regularization order ``m = ceil(1/lambda)``."""
    v = params.variant
    if v == "p0":
        lam = 1 / params.p
    elif v == "0q":
        lam = 1 / params.q
    else:
        lam = 1 / params.p + 1 / params.q
        if abs(lam - (params.alpha + params.beta)) > _EQ_TOL:
            raise InvalidParams("conjugation number needs 1/p + 1/q = alpha + beta")
    m = max(1, math.ceil(1 / lam - 1e-12))
    return lam, m


def krein_norm(a: FourierSymbol, params: KreinParams, grid_M: int | None = None) -> float:
    """``||a||_{L^inf}`` plus ``||Qa||_{B_p^alpha}`` and/or ``||Pa||_{B_q^beta}``."""
    total = sup_norm(a, grid_M)
    if params.variant in ("p0", "pq"):
        total += besov_norm(riesz_project(a, "Q"), params.p, params.alpha, grid_M)
    if params.variant in ("0q", "pq"):
        total += besov_norm(riesz_project(a, "P"), params.q, params.beta, grid_M)
    return total


def krein_coefficient_sum(a: FourierSymbol) -> float:
    """``sum_k |k| ||a_k||_F^2``, finite exactly on the classical Krein algebra."""
    return float(sum(abs(k) * np.sum(np.abs(blk) ** 2) for k, blk in a.items()))
