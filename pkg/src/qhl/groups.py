"""The monomial pseudo-reflection groups G(m, t, d) acting on the polydisc.

An element is a pair (perm, nu) acting by

    (g . z)_j = eps^{nu_j} z_{perm(j)},   eps = exp(2 pi i / m),

with sum(nu) divisible by t.  Functions are acted on by pull-back,
``act_on_poly(g, f)(z) = f(g . z)``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .laurent import LaurentPoly, divide_exact, elementary_symmetric, NotDivisibleError

ZERO_TOL = 1e-12


class InvalidParameters(ValueError):
    pass


class NotFound(LookupError):
    pass


@lru_cache(maxsize=None)
def _roots(m: int) -> tuple[complex, ...]:
    out = []
    for k in range(m):
        w = cmath.exp(2j * math.pi * k / m)
        re = 0.0 if abs(w.real) < 1e-15 else w.real
        im = 0.0 if abs(w.imag) < 1e-15 else w.imag
        out.append(complex(re, im))
    return tuple(out)


def root_of_unity(k: int, m: int) -> complex:
    """eps^k for eps = exp(2 pi i / m); exact for the values +-1, +-i."""
    return _roots(m)[k % m]


def validate_params(m: int, t: int, d: int) -> None:
    if min(m, t, d) < 1:
        raise InvalidParameters(f"m, t, d must be positive (got m={m}, t={t}, d={d})")
    if m % t:
        raise InvalidParameters(f"t={t} must divide m={m}")
    if d < 2:
        raise InvalidParameters(f"d={d} must be at least 2")


@dataclass(frozen=True)
class GroupElement:
    perm: tuple[int, ...]
    exps: tuple[int, ...]
    m: int
    t: int
    d: int

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.d)) or len(self.exps) != self.d:
            raise InvalidParameters(f"malformed element perm={self.perm} exps={self.exps}")
        if sum(self.exps) % self.t:
            raise InvalidParameters(f"exponent sum {sum(self.exps)} not divisible by t={self.t}")

    @classmethod
    def identity(cls, m: int, t: int, d: int) -> "GroupElement":
        return cls(tuple(range(d)), (0,) * d, m, t, d)

    @property
    def params(self) -> tuple[int, int, int]:
        return (self.m, self.t, self.d)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.d)) and not any(self.exps)

    def __call__(self, z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        phases = np.array([root_of_unity(k, self.m) for k in self.exps])
        return phases * z[..., list(self.perm)]

    def matrix(self) -> np.ndarray:
        """The unitary U with g . z = U z."""
        u = np.zeros((self.d, self.d), dtype=complex)
        for j, (p, k) in enumerate(zip(self.perm, self.exps)):
            u[j, p] = root_of_unity(k, self.m)
        return u

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return group_compose(self, other)

    def inverse(self) -> "GroupElement":
        inv = [0] * self.d
        for j, p in enumerate(self.perm):
            inv[p] = j
        # (g^-1 . z)_p = eps^{-nu_j} z_j  where perm(j) = p
        exps = tuple((-self.exps[inv[p]]) % self.m for p in range(self.d))
        return GroupElement(tuple(inv), exps, self.m, self.t, self.d)

    def sign(self) -> int:
        s = 1
        seen = [False] * self.d
        for i in range(self.d):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = self.perm[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s


def group_compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """The element g o h with (g o h) . z = g . (h . z)."""
    if g.params != h.params:
        raise InvalidParameters(f"mismatched parameters {g.params} vs {h.params}")
    perm = tuple(h.perm[g.perm[j]] for j in range(g.d))
    exps = tuple((g.exps[j] + h.exps[g.perm[j]]) % g.m for j in range(g.d))
    return GroupElement(perm, exps, g.m, g.t, g.d)


def enumerate_group(m: int, t: int, d: int) -> list[GroupElement]:
    """All m^d d! / t elements of G(m, t, d), identity first."""
    validate_params(m, t, d)
    elements = []
    for perm in itertools.permutations(range(d)):
        for exps in itertools.product(range(m), repeat=d):
            if sum(exps) % t == 0:
                elements.append(GroupElement(perm, exps, m, t, d))
    return elements


def act_on_poly(g: GroupElement, f: LaurentPoly) -> LaurentPoly:
    """The pull-back z -> f(g . z).

    zeta^alpha becomes eps^{nu . alpha} prod_j zeta_{perm(j)}^{alpha_j}.
    """
    if f.dims != g.d:
        raise InvalidParameters(f"polynomial has {f.dims} variables, group acts on {g.d}")
    out = {}
    for alpha, c in f.items():
        beta = [0] * g.d
        for j, a in enumerate(alpha):
            beta[g.perm[j]] = a
        phase = root_of_unity(sum(k * a for k, a in zip(g.exps, alpha)), g.m)
        key = tuple(beta)
        out[key] = out.get(key, 0j) + phase * c
    return LaurentPoly(g.d, out)


@dataclass(frozen=True)
class Character:
    """g -> sgn(perm)^a * eps^{c * sum(nu)} on G(m, t, d)."""

    a: int
    c: int
    m: int
    t: int
    d: int

    def __call__(self, g: GroupElement) -> complex:
        s = g.sign() if self.a % 2 else 1
        return s * root_of_unity(self.c * sum(g.exps), self.m)

    def is_trivial_on(self, group: Sequence[GroupElement]) -> bool:
        return all(abs(self(g) - 1) < ZERO_TOL for g in group)

    def label(self) -> str:
        return f"a={self.a},c={self.c}"


def check_multiplicative(rho: Character, group: Sequence[GroupElement]) -> float:
    """Largest |rho(gh) - rho(g) rho(h)| over all pairs."""
    worst = 0.0
    for g in group:
        for h in group:
            worst = max(worst, abs(rho(g @ h) - rho(g) * rho(h)))
    return worst


def characters_1d(m: int, t: int, d: int, group: Sequence[GroupElement] | None = None) -> list[Character]:
    """Distinct determinant-type characters of G(m, t, d), trivial first."""
    group = group if group is not None else enumerate_group(m, t, d)
    out: list[Character] = []
    tables: list[np.ndarray] = []
    for a in (0, 1):
        for c in range(m // t):
            rho = Character(a, c, m, t, d)
            if check_multiplicative(rho, group) > ZERO_TOL:
                raise AssertionError(f"character {rho.label()} is not multiplicative")
            table = np.array([rho(g) for g in group])
            if any(np.max(np.abs(table - other)) < ZERO_TOL for other in tables):
                continue
            tables.append(table)
            out.append(rho)
    return out


def theta_map(m: int, t: int, d: int) -> list[LaurentPoly]:
    """Basic invariants: E_i(z^m) for i < d and (z_1 ... z_d)^{m/t}."""
    validate_params(m, t, d)
    theta = [elementary_symmetric(d, i, power=m) for i in range(1, d)]
    theta.append(LaurentPoly.monomial((m // t,) * d))
    return theta


def theta_degrees(m: int, t: int, d: int) -> list[int]:
    return [j * m for j in range(1, d)] + [d * m // t]


def project_p_rho(group: Sequence[GroupElement], rho: Character, f: LaurentPoly,
                  tol: float = ZERO_TOL) -> LaurentPoly:
    """Averaging projection (1/|G|) sum rho(g^-1) g(f) onto rho-relative invariants."""
    acc: dict = {}
    for g in group:
        w = rho(g).conjugate()
        for alpha, c in act_on_poly(g, f).items():
            acc[alpha] = acc.get(alpha, 0j) + w * c
    n = len(group)
    return LaurentPoly(f.dims, {a: c / n for a, c in acc.items()}, prune=tol)


def descending_partitions(total: int, parts: int, cap: int | None = None):
    """Exponent vectors alpha_1 >= ... >= alpha_parts >= 0 summing to total."""
    cap = total if cap is None else cap
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in descending_partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _normalize_leading(f: LaurentPoly) -> LaurentPoly:
    alpha = max(a for a, _ in f.items())
    return f.scale(1.0 / f[alpha])


def compute_ell_rho(group: Sequence[GroupElement], rho: Character, degree_cap: int | None = None,
                    verify: bool = True) -> LaurentPoly:
    """Minimal-degree homogeneous relative invariant for rho.

    Monomials are symmetrized degree by degree; the first nonzero image is
    the generator (all images of that degree are proportional to it).  It
    is scaled so that its lexicographically largest monomial has
    coefficient +1.  With ``verify``, every relative invariant obtained
    from monomials up to ``degree_cap`` must be exactly divisible by it.
    """
    if not group:
        raise InvalidParameters("empty group")
    g0 = group[0]
    d = g0.d
    if degree_cap is None:
        degree_cap = 2 * d * g0.m
    if degree_cap < 0:
        raise InvalidParameters("degree_cap must be nonnegative")
    ell = None
    for k in range(degree_cap + 1):
        images = []
        for alpha in descending_partitions(k, d):
            img = project_p_rho(group, rho, LaurentPoly.monomial(alpha))
            if not img.is_zero():
                images.append(img)
        if images:
            ell = _normalize_leading(images[0])
            for img in images[1:]:
                divide_exact(img, ell)
            break
    if ell is None:
        raise NotFound(f"no relative invariant for {rho.label()} up to degree {degree_cap}")
    if verify:
        m0 = ell.degree()
        for k in range(m0 + 1, degree_cap + 1):
            for alpha in descending_partitions(k, d):
                img = project_p_rho(group, rho, LaurentPoly.monomial(alpha))
                if img.is_zero():
                    continue
                try:
                    divide_exact(img, ell)
                except NotDivisibleError as exc:
                    raise AssertionError(f"relative invariant of degree {k} not divisible by ell") from exc
    return ell


@dataclass(frozen=True)
class QuotientContext:
    """Everything a Hardy-space computation on theta(D^d) needs."""

    m: int
    t: int
    d: int
    group: tuple[GroupElement, ...]
    rho: Character
    theta: tuple[LaurentPoly, ...]
    ell: LaurentPoly
    m0: int
    degrees: tuple[int, ...]
    characters: tuple[Character, ...] = field(default=(), repr=False)

    @classmethod
    def build(cls, m: int = 1, t: int = 1, d: int = 2, a: int = 0, c: int = 0,
              verify_ell: bool = True) -> "QuotientContext":
        validate_params(m, t, d)
        if a not in (0, 1) or not 0 <= c < m // t:
            raise InvalidParameters(f"character (a={a}, c={c}) outside a in {{0,1}}, 0 <= c < {m // t}")
        group = enumerate_group(m, t, d)
        chars = characters_1d(m, t, d, group)
        rho = Character(a, c, m, t, d)
        table = np.array([rho(g) for g in group])
        match = [ch for ch in chars if np.max(np.abs(table - np.array([ch(g) for g in group]))) < ZERO_TOL]
        rho = match[0]
        ell = compute_ell_rho(group, rho, verify=verify_ell)
        return cls(m, t, d, tuple(group), rho, tuple(theta_map(m, t, d)), ell, ell.degree(),
                   tuple(theta_degrees(m, t, d)), tuple(chars))

    @property
    def order(self) -> int:
        return len(self.group)

    @property
    def eps(self) -> complex:
        return root_of_unity(1, self.m)

    def project(self, f: LaurentPoly) -> LaurentPoly:
        return project_p_rho(self.group, self.rho, f)

    def symmetrize(self, f: LaurentPoly) -> LaurentPoly:
        """Projection onto G-invariants (trivial character)."""
        return project_p_rho(self.group, Character(0, 0, self.m, self.t, self.d), f)

    def invariance_residual(self, f: LaurentPoly) -> float:
        return max(act_on_poly(g, f).distance(f) for g in self.group)

    def relative_invariance_residual(self, f: LaurentPoly) -> float:
        return max(act_on_poly(g, f).distance(f.scale(self.rho(g))) for g in self.group)

    def theta_point(self, z: Sequence[complex]) -> np.ndarray:
        return np.array([th(z) for th in self.theta])

    def describe(self) -> str:
        return f"G({self.m},{self.t},{self.d}) rho=({self.rho.label()})"
