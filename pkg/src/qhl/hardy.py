"""Quotient Hardy spaces H^2_rho(theta(D^d)), pulled back to the torus.

Everything is computed on the T^d side.  A function f on the quotient is
represented by ell_rho * (f o theta), an element of R_rho^G L^2(T^d), and a
quotient point theta(z) by a chosen preimage z in D^d.  The basis vector
t_lambda on the quotient corresponds to e_lambda on the torus, so

    t_lambda(theta(z)) = sqrt(|G|) * e_lambda(z) / ell_rho(z).

Integrals against mu_{rho,theta} become (1/|G|) int_{T^d} (.) |ell_rho|^2 dnu,
evaluated on tensor grids of roots of unity.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import QuotientContext
from .laurent import LaurentPoly, divide_exact, torus_grid

ELL_ZERO_TOL = 1e-14


class DomainError(ValueError):
    pass


class ZeroOfEll(DomainError):
    pass


@dataclass(frozen=True)
class BasisEntry:
    lam: tuple[int, ...]
    e: LaurentPoly
    analytic: bool
    degree: int


class BasisSet:
    """Truncated orthonormal basis {e_lambda} of R_rho^G L^2(T^d).

    The window is the box max|lambda_i| <= D.  Orbit representatives are
    the descending-sorted exponent vectors, and e_lambda is normalised so
    that its zeta^lambda coefficient is positive real.
    """

    def __init__(self, ctx: QuotientContext, D: int, entries: Sequence[BasisEntry]):
        self.ctx = ctx
        self.D = D
        self.entries = sorted(entries, key=lambda en: (en.degree, en.lam))
        self._index = {en.lam: i for i, en in enumerate(self.entries)}
        self._factors: dict[tuple[int, ...], LaurentPoly] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, lam) -> bool:
        return tuple(lam) in self._index

    def __getitem__(self, lam) -> BasisEntry:
        return self.entries[self._index[tuple(lam)]]

    @property
    def analytic(self) -> list[BasisEntry]:
        return [en for en in self.entries if en.analytic]

    @property
    def coanalytic(self) -> list[BasisEntry]:
        return [en for en in self.entries if not en.analytic]

    def gram(self, entries: Sequence[BasisEntry] | None = None) -> np.ndarray:
        entries = self.entries if entries is None else entries
        n = len(entries)
        g = np.zeros((n, n), dtype=complex)
        for i, a in enumerate(entries):
            for j in range(i, n):
                g[i, j] = a.e.inner(entries[j].e)
                g[j, i] = g[i, j].conjugate()
        return g

    def gram_residual(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(len(g))))) if len(g) else 0.0

    def coefficients(self, f: LaurentPoly, entries: Sequence[BasisEntry] | None = None) -> np.ndarray:
        entries = self.entries if entries is None else entries
        return np.array([f.inner(en.e) for en in entries], dtype=complex)

    def relative_factor(self, lam) -> LaurentPoly:
        en = self[lam]
        if tuple(lam) not in self._factors:
            self._factors[tuple(lam)] = relative_factor(self.ctx, en)
        return self._factors[tuple(lam)]

    def to_dict(self) -> dict:
        return {
            "group": [self.ctx.m, self.ctx.t, self.ctx.d],
            "character": [self.ctx.rho.a, self.ctx.rho.c],
            "D": self.D,
            "entries": [{"lambda": list(en.lam), "analytic": en.analytic, "degree": en.degree,
                         "e": en.e.to_dict()} for en in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def canonical_exponents(D: int, d: int):
    """Descending-sorted vectors in the box [-D, D]^d."""
    for combo in itertools.combinations_with_replacement(range(D, -D - 1, -1), d):
        yield combo


def build_basis(ctx: QuotientContext, D: int) -> BasisSet:
    if D < 0:
        raise ValueError(f"window D must be nonnegative, got {D}")
    entries = []
    for lam in canonical_exponents(D, ctx.d):
        img = ctx.project(LaurentPoly.monomial(lam))
        if img.is_zero():
            continue
        # coefficient of zeta^lam in P(zeta^lam) is ||P(zeta^lam)||^2 > 0
        e = img.scale(1.0 / img.norm())
        lead = e[lam]
        e = e.scale(abs(lead) / lead)
        entries.append(BasisEntry(lam, e, min(lam) >= 0, sum(lam)))
    return BasisSet(ctx, D, entries)


def relative_factor(ctx: QuotientContext, entry: BasisEntry | LaurentPoly) -> LaurentPoly:
    """The G-invariant polynomial g_hat with ell_rho * g_hat = e_lambda."""
    e = entry.e if isinstance(entry, BasisEntry) else entry
    if not e.is_polynomial():
        raise ValueError("relative_factor needs an analytic e_lambda")
    return divide_exact(e, ctx.ell)


# -- kernels --------------------------------------------------------------

def _check_disc(*points) -> None:
    for z in points:
        if np.any(np.abs(np.asarray(z)) >= 1):
            raise DomainError(f"point {z} is not in the open polydisc")


def _ell_at(ctx: QuotientContext, z) -> complex:
    v = ctx.ell(z)
    if abs(v) <= ELL_ZERO_TOL:
        raise ZeroOfEll(f"ell_rho vanishes at {z}")
    return v


def kernel_numerator(ctx: QuotientContext, z, w) -> np.ndarray:
    """sum_g conj(rho(g)) S_Omega(g.z, w), vectorised over the leading axes of w.

    This equals ell(z) conj(ell(w)) S_{rho,theta}(theta z, theta w) and stays
    finite where ell vanishes, so quadratures use it directly.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    total = np.zeros(w.shape[:-1], dtype=complex)
    for g in ctx.group:
        gz = g(z)
        total = total + ctx.rho(g).conjugate() / np.prod(1.0 - gz * np.conj(w), axis=-1)
    return total


def szego_kernel(ctx: QuotientContext, z, w) -> complex:
    """S_{rho,theta}(theta(z), theta(w)) in closed form."""
    _check_disc(z, w)
    lz, lw = _ell_at(ctx, z), _ell_at(ctx, w)
    return complex(kernel_numerator(ctx, z, w)) / (lz * np.conj(lw))


def t_value(ctx: QuotientContext, entry: BasisEntry, z) -> complex:
    """t_lambda(theta(z)) = sqrt|G| e_lambda(z) / ell(z)."""
    return math.sqrt(ctx.order) * entry.e(z) / _ell_at(ctx, z)


def szego_series(basis: BasisSet, z, w) -> complex:
    """Truncated expansion sum_{lambda in Lambda_+} t_lambda(theta z) conj t_lambda(theta w)."""
    ctx = basis.ctx
    _check_disc(z, w)
    lz, lw = _ell_at(ctx, z), _ell_at(ctx, w)
    s = sum(en.e(z) * np.conj(en.e(w)) for en in basis.analytic)
    return ctx.order * s / (lz * np.conj(lw))


def reproducing_check(ctx: QuotientContext, f_invariant: LaurentPoly, w, D: int,
                      basis: BasisSet | None = None) -> float:
    """|<f, S(., theta w)> - f(theta w)| for the quotient function f with ell*(f o theta) = f_invariant.

    The pairing runs through the truncated kernel expansion; the reference
    value is the direct evaluation f_invariant(w) / ell(w).
    """
    if ctx.relative_invariance_residual(f_invariant) > 1e-10:
        raise ValueError("f_invariant is not a rho-relative invariant")
    if not f_invariant.is_polynomial():
        raise ValueError("f_invariant must be a polynomial")
    _check_disc(w)
    lw = _ell_at(ctx, w)
    basis = basis if basis is not None else build_basis(ctx, D)
    # <f, t_lambda> = <F, e_lambda> / sqrt|G|,  t_lambda(theta w) = sqrt|G| e_lambda(w) / ell(w)
    paired = sum(f_invariant.inner(en.e) * en.e(w) for en in basis.analytic) / lw
    direct = f_invariant(w) / lw
    return abs(paired - direct)


def poisson_szego(ctx: QuotientContext, z, zeta) -> float:
    """P_rho(theta z, theta zeta) = |S(theta z, theta zeta)|^2 / S(theta z, theta z)."""
    _check_disc(z)
    zeta = np.asarray(zeta, dtype=complex)
    if np.max(np.abs(np.abs(zeta) - 1)) > 1e-12:
        raise DomainError("zeta must lie on the torus")
    lz = _ell_at(ctx, z)
    lzeta = _ell_at(ctx, zeta)
    s_pz = complex(kernel_numerator(ctx, z, zeta)) / (lz * np.conj(lzeta))
    s_pp = szego_kernel(ctx, z, z).real
    return abs(s_pz) ** 2 / s_pp


def poisson_weights(ctx: QuotientContext, z, grid: np.ndarray) -> np.ndarray:
    """Quadrature weights w_k with sum_k w_k F(zeta_k) = int f P_rho(theta z, .) dmu.

    P_rho |ell|^2 = |K(z, zeta)|^2 / K(z, z) with K the kernel numerator,
    and mu carries the factor 1/|G|.
    """
    _check_disc(z)
    _ell_at(ctx, z)
    k_zz = complex(kernel_numerator(ctx, z, np.asarray(z, dtype=complex)[None, :])[0]).real
    k = kernel_numerator(ctx, z, grid)
    return np.abs(k) ** 2 / k_zz / ctx.order / len(grid)


def default_grid_order(d: int) -> int:
    return 128 if d <= 2 else 32


def _check_invariant(ctx: QuotientContext, f: LaurentPoly, what: str) -> None:
    if ctx.invariance_residual(f) > 1e-10:
        raise ValueError(f"{what} is not G-invariant")


def poisson_extension(ctx: QuotientContext, f_pullback: LaurentPoly, z, q: int | None = None,
                      offset: float = 0.0) -> complex:
    """Poisson-Szego extension tilde f(theta z) of the boundary function with f o theta = f_pullback."""
    q = q or default_grid_order(ctx.d)
    if q < 4:
        raise ValueError("grid order q must be at least 4")
    _check_invariant(ctx, f_pullback, "f_pullback")
    grid = torus_grid(q, ctx.d, offset)
    return complex(np.sum(poisson_weights(ctx, z, grid) * f_pullback.evaluate_grid(grid)))


def poisson_mass(ctx: QuotientContext, z, q: int | None = None) -> float:
    """int P_rho(theta z, .) dmu, which must equal 1."""
    q = q or default_grid_order(ctx.d)
    return float(np.sum(poisson_weights(ctx, z, torus_grid(q, ctx.d))))
