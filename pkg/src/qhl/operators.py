"""Truncated operator matrices on H^2_rho(theta(D^d)) in the {e_lambda} basis.

All entries are exact coefficient pairings <Psi e_mu, e_lambda> on the torus,
so a matrix at window D agrees entrywise with the same rows/cols at any
larger window.  Only products of truncated matrices can be clipped; the
checkers therefore restrict to interior rows/cols.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import QuotientContext, enumerate_group, validate_params
from .hardy import BasisEntry, BasisSet, build_basis, poisson_weights, default_grid_order
from .laurent import LaurentPoly, substitute_theta, torus_grid
from . import numerics

INVARIANCE_TOL = 1e-10


class WindowTooSmall(ValueError):
    pass


class SymbolError(ValueError):
    pass


@dataclass
class OperatorMatrix:
    rows: list[tuple[int, ...]]
    cols: list[tuple[int, ...]]
    entries: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def entry(self, lam, mu) -> complex:
        return complex(self.entries[self.rows.index(tuple(lam)), self.cols.index(tuple(mu))])

    def norm(self) -> float:
        if self.entries.size == 0:
            return 0.0
        return numerics.opnorm(self.entries)

    def submatrix(self, rows: Sequence, cols: Sequence) -> "OperatorMatrix":
        ri = [self.rows.index(tuple(r)) for r in rows]
        ci = [self.cols.index(tuple(c)) for c in cols]
        return OperatorMatrix([tuple(r) for r in rows], [tuple(c) for c in cols],
                              self.entries[np.ix_(ri, ci)], dict(self.meta))

    def to_dict(self) -> dict:
        return {
            "rows": [list(r) for r in self.rows],
            "cols": [list(c) for c in self.cols],
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in self.entries],
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorMatrix":
        rows = [tuple(r) for r in data["rows"]]
        cols = [tuple(c) for c in data["cols"]]
        arr = np.array(data["entries"], dtype=float).reshape(len(rows), len(cols), 2)
        return cls(rows, cols, arr[..., 0] + 1j * arr[..., 1], dict(data.get("meta", {})))

    @classmethod
    def from_json(cls, text: str) -> "OperatorMatrix":
        return cls.from_dict(json.loads(text))


# -- symbols --------------------------------------------------------------

def pullback_symbol(ctx: QuotientContext, symbol: LaurentPoly) -> LaurentPoly:
    """Accept either a torus pull-back (d variables) or a (p, pbar) polynomial (2d variables)."""
    if symbol.dims == 2 * ctx.d:
        return substitute_theta(symbol, ctx.theta)
    if symbol.dims != ctx.d:
        raise SymbolError(f"symbol has {symbol.dims} variables; expected {ctx.d} or {2 * ctx.d}")
    return symbol


def _invariant_symbol(ctx: QuotientContext, symbol: LaurentPoly) -> LaurentPoly:
    psi = pullback_symbol(ctx, symbol)
    res = ctx.invariance_residual(psi)
    if res > INVARIANCE_TOL:
        raise SymbolError(f"symbol is not G-invariant (residual {res:.3g})")
    return psi


def _pairings(rows: Sequence[BasisEntry], images: Sequence[LaurentPoly]) -> np.ndarray:
    out = np.zeros((len(rows), len(images)), dtype=complex)
    for j, img in enumerate(images):
        if img.is_zero():
            continue
        for i, en in enumerate(rows):
            out[i, j] = img.inner(en.e)
    return out


def _meta(kind: str, basis: BasisSet, **extra) -> dict:
    ctx = basis.ctx
    meta = {"kind": kind, "group": [ctx.m, ctx.t, ctx.d], "character": [ctx.rho.a, ctx.rho.c],
            "D": basis.D}
    meta.update(extra)
    return meta


def toeplitz_matrix(ctx: QuotientContext, basis: BasisSet, symbol: LaurentPoly) -> OperatorMatrix:
    psi = _invariant_symbol(ctx, symbol)
    ana = basis.analytic
    entries = _pairings(ana, [psi * en.e for en in ana])
    return OperatorMatrix([en.lam for en in ana], [en.lam for en in ana], entries,
                          _meta("toeplitz", basis, symbol=repr(psi)))


def small_hankel_matrix(ctx: QuotientContext, basis: BasisSet, symbol: LaurentPoly) -> OperatorMatrix:
    """Matrix A of the conjugate-linear h_phi: coefficients of h_phi(f) are A @ conj(c_f).

    With f = sum c_mu t_mu, the pull-back of f is sqrt|G| sum c_mu g_mu where
    e_mu = ell * g_mu, g_mu invariant.  Then phi * conj(f) pulls back to an
    invariant function whose rho-representative is ell * Psi * conj(g_mu);
    projecting onto the analytic e_lambda gives the entry.  Dividing by
    conj(ell) on the torus is never needed.
    """
    psi = _invariant_symbol(ctx, symbol)
    if not psi.is_polynomial():
        raise SymbolError("small Hankel symbol must be analytic")
    ana = basis.analytic
    images = [ctx.ell * psi * basis.relative_factor(en.lam).conj() for en in ana]
    entries = _pairings(ana, images)
    return OperatorMatrix([en.lam for en in ana], [en.lam for en in ana], entries,
                          _meta("small_hankel", basis, symbol=repr(psi)))


def big_hankel_matrix(ctx: QuotientContext, basis: BasisSet, symbol: LaurentPoly) -> OperatorMatrix:
    psi = _invariant_symbol(ctx, symbol)
    ana, co = basis.analytic, basis.coanalytic
    entries = _pairings(co, [psi * en.e for en in ana])
    return OperatorMatrix([en.lam for en in co], [en.lam for en in ana], entries,
                          _meta("big_hankel", basis, symbol=repr(psi)))


def delta_r_matrix(ctx: QuotientContext, basis: BasisSet, r: float) -> OperatorMatrix:
    """delta_r f(p) = r^{2 m0} f(r^m p) is diagonal: e_lambda -> r^{m0 + |lambda|} e_lambda."""
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    ana = basis.analytic
    diag = np.array([r ** (ctx.m0 + en.degree) for en in ana], dtype=complex)
    lams = [en.lam for en in ana]
    return OperatorMatrix(lams, list(lams), np.diag(diag), _meta("delta_r", basis, r=r))


def matrix_rank(op: OperatorMatrix | np.ndarray, tol: float = 1e-8) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)
    return numerics.numerical_rank(M, tol)


def hartman_rank_bound(ctx: QuotientContext, basis: BasisSet, gamma: Sequence[int]) -> int:
    """#{lambda in Lambda_+ : |lambda| <= m0 + sum gamma_j m_j}."""
    d0 = ctx.m0 + sum(g * mj for g, mj in zip(gamma, ctx.degrees))
    return sum(1 for en in basis.analytic if en.degree <= d0)


def theta_monomial(ctx: QuotientContext, gamma: Sequence[int]) -> LaurentPoly:
    """p^gamma pulled back: prod theta_j^gamma_j."""
    out = LaurentPoly.constant(ctx.d)
    for th, g in zip(ctx.theta, gamma):
        if g:
            out = out * th ** g
    return out


# -- algebraic checks -------------------------------------------------------

@dataclass
class ResidualReport:
    residuals: dict[str, float]
    margin: int
    interior_size: int

    @property
    def max(self) -> float:
        return max(self.residuals.values(), default=0.0)


def brown_halmos_margin(ctx: QuotientContext) -> int:
    return ctx.t * ctx.degrees[-1] + max(ctx.degrees)


def _interior(basis: BasisSet, margin: int) -> np.ndarray:
    if basis.D <= margin:
        raise WindowTooSmall(f"window-too-small: D={basis.D} must exceed the safe margin {margin}")
    return np.array([i for i, en in enumerate(basis.analytic) if en.degree <= basis.D - margin], dtype=int)


def check_brown_halmos(ctx: QuotientContext, basis: BasisSet, symbol: LaurentPoly) -> ResidualReport:
    """Residuals of T_{p_d}^* T T_{p_d} = T and T_{p_{d-j}}^* T T_{p_d}^t = T T_{p_j} on the interior."""
    margin = brown_halmos_margin(ctx)
    idx = _interior(basis, margin)
    T = toeplitz_matrix(ctx, basis, symbol).entries
    P = [toeplitz_matrix(ctx, basis, th).entries for th in ctx.theta]
    d = ctx.d
    sub = np.ix_(idx, idx)
    res = {}
    lhs = P[d - 1].conj().T @ T @ P[d - 1]
    res["T_pd^* T T_pd = T"] = float(np.max(np.abs((lhs - T)[sub]), initial=0.0))
    Pdt = np.linalg.matrix_power(P[d - 1], ctx.t)
    for j in range(1, d):
        lhs = P[d - j - 1].conj().T @ T @ Pdt
        rhs = T @ P[j - 1]
        res[f"T_p{d - j}^* T T_pd^t = T T_p{j}"] = float(np.max(np.abs((lhs - rhs)[sub]), initial=0.0))
    return ResidualReport(res, margin, len(idx))


def check_hankel_intertwining(ctx: QuotientContext, basis: BasisSet, symbol: LaurentPoly) -> ResidualReport:
    """T_{p_j}^* h = h T_{p_j}; with h(f) = A conj(c) this reads M_j^H A = A conj(M_j)."""
    margin = max(ctx.degrees)
    idx = _interior(basis, margin)
    A = small_hankel_matrix(ctx, basis, symbol).entries
    sub = np.ix_(idx, idx)
    res = {}
    for j, th in enumerate(ctx.theta, start=1):
        M = toeplitz_matrix(ctx, basis, th).entries
        diff = M.conj().T @ A - A @ M.conj()
        res[f"p{j}"] = float(np.max(np.abs(diff[sub]), initial=0.0))
    return ResidualReport(res, margin, len(idx))


def small_hankel_symmetry(op: OperatorMatrix) -> float:
    """max |<h f, g> - <h g, f>| over basis pairs, i.e. max |A - A^T|."""
    return float(np.max(np.abs(op.entries - op.entries.T), initial=0.0))


# -- BMO identity -------------------------------------------------------------

@dataclass
class BmoReport:
    residual1: float
    residual2: float
    lhs: float
    rhs: float
    hankel_bound: float


def bmo_identity_check(ctx: QuotientContext, f_pullback: LaurentPoly, z, q: int | None = None,
                       D: int = 8) -> BmoReport:
    """int |f - f~(p)|^2 P(p, .) dmu against ||f s_p||^2 - |f~(p)|^2.

    The left side uses the q^d root-of-unity grid; the right side uses the
    grid rotated by half a step, so the two quadratures share no nodes.
    """
    q = q or default_grid_order(ctx.d)
    f = _invariant_symbol(ctx, f_pullback)
    grid_a = torus_grid(q, ctx.d)
    w_a = poisson_weights(ctx, z, grid_a)
    fa = f.evaluate_grid(grid_a)
    ext_a = np.sum(w_a * fa)
    lhs = float(np.sum(w_a * np.abs(fa - ext_a) ** 2))

    grid_b = torus_grid(q, ctx.d, offset=0.5)
    w_b = poisson_weights(ctx, z, grid_b)
    fb = f.evaluate_grid(grid_b)
    rhs = float(np.sum(w_b * np.abs(fb) ** 2) - abs(np.sum(w_b * fb)) ** 2)

    basis = build_basis(ctx, D)
    h1 = big_hankel_matrix(ctx, basis, f).norm()
    h2 = big_hankel_matrix(ctx, basis, f.conj()).norm()
    bound = 2 * (h1 ** 2 + h2 ** 2)
    return BmoReport(abs(lhs - rhs), max(0.0, lhs - bound), lhs, rhs, bound)


# -- Nehari experiment ------------------------------------------------------

@dataclass
class NehariReport:
    m: int
    t: int
    d: int
    N: int
    D: int
    q: int
    hankel_norm: float
    phi0_sup_lower: float
    lambda1_prime_count: int
    lambda2_prime_count: int
    lambda1_count: int = 0
    lambda2_count: int = 0

    def row(self) -> dict:
        return {"N": self.N, "D": self.D, "hankel_norm": self.hankel_norm,
                "phi0_sup_lower": self.phi0_sup_lower, "lambda1_prime": self.lambda1_prime_count,
                "lambda2_prime": self.lambda2_prime_count}


def nehari_symbol(ctx: QuotientContext, N: int) -> LaurentPoly:
    """Phi_N = average over G of sum_{n<=N} (1/n) z1^n conj(z2)^n."""
    base = [0] * ctx.d
    terms = {}
    for n in range(1, N + 1):
        alpha = list(base)
        alpha[0], alpha[1] = n, -n
        terms[tuple(alpha)] = 1.0 / n
    return ctx.symmetrize(LaurentPoly(ctx.d, terms))


def lambda_counts(m: int, t: int, d: int) -> tuple[int, int, int, int]:
    """(|Lambda_1|, |Lambda_1'|, |Lambda_2|, |Lambda_2'|) by scanning G."""
    l1 = l1p = l2 = l2p = 0
    for g in enumerate_group(m, t, d):
        same = g.exps[0] % m == g.exps[1] % m
        if g.perm[0] == 0 and g.perm[1] == 1:
            l1 += 1
            l1p += same
        elif g.perm[0] == 1 and g.perm[1] == 0:
            l2 += 1
            l2p += same
    return l1, l1p, l2, l2p


def phi0_coefficients(phi: LaurentPoly) -> dict[int, complex]:
    """Extract map: the a_n of the z1^n conj(z2)^n part of phi, as a one-variable symbol."""
    out = {}
    for alpha, c in phi.items():
        if alpha[0] == -alpha[1] and alpha[0] != 0 and not any(alpha[2:]):
            out[alpha[0]] = c
    return out


def phi0_sup(coeffs: dict[int, complex], q: int) -> float:
    z = np.exp(2j * np.pi * np.arange(q) / q)
    vals = sum(c * z ** n for n, c in coeffs.items())
    return float(np.max(np.abs(vals)))


def degree_block_hankel_norm(basis: BasisSet, psi: LaurentPoly) -> float:
    """Norm of the big Hankel of a degree-preserving symbol, block by block.

    A symbol whose terms all have total degree 0 maps each homogeneous
    component to itself, so the truncated big Hankel matrix is
    block-diagonal over the degree of lambda = degree of mu.
    """
    if any(sum(alpha) != 0 for alpha in psi.support()):
        raise SymbolError("symbol must be homogeneous of total degree 0")
    ana, co = {}, {}
    for en in basis:
        (ana if en.analytic else co).setdefault(en.degree, []).append(en)
    best = 0.0
    for k, cols in ana.items():
        rows = co.get(k)
        if not rows:
            continue
        block = _pairings(rows, [psi * en.e for en in cols])
        best = max(best, numerics.opnorm(block))
    return best


def nehari_experiment(m: int, t: int, d: int, N: int, D: int | None = None,
                      q: int | None = None) -> NehariReport:
    validate_params(m, t, d)
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    D = N if D is None else D
    if D < 1:
        raise ValueError(f"window D must be positive, got {D}")
    q = max(128, 4 * N) if q is None else q
    if q < 4 * N:
        raise ValueError(f"grid order q={q} must be at least 4N={4 * N}")
    ctx = QuotientContext.build(m=m, t=t, d=d)
    phi = nehari_symbol(ctx, N)
    basis = build_basis(ctx, D)
    hn = degree_block_hankel_norm(basis, phi)
    sup = phi0_sup(phi0_coefficients(phi), q)
    l1, l1p, l2, l2p = lambda_counts(m, t, d)
    return NehariReport(m, t, d, N, D, q, hn, sup, l1p, l2p, l1, l2)


def harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))
