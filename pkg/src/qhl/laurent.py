"""Sparse Laurent polynomials on the torus T^d.

A :class:`LaurentPoly` maps integer exponent vectors to complex
coefficients.  It is the single carrier type for polynomials, torus
symbols, basis vectors and truncated kernel expansions.  On T^d the
conjugate of zeta^alpha is zeta^(-alpha), which makes L^2(T^d) inner
products an exact coefficient pairing.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14
DIVISION_RTOL = 1e-10

Exponent = tuple[int, ...]


class LaurentError(ValueError):
    """Raised on malformed Laurent data or dimension mismatch."""


class NotDivisibleError(LaurentError):
    pass


class LaurentPoly:
    """Finitely supported complex function on Z^d, read as sum c_alpha zeta^alpha.

    Instances are treated as immutable; every operation returns a new
    polynomial.  Coefficients with modulus <= ``PRUNE_TOL`` are dropped.
    """

    __slots__ = ("dims", "_coeffs")
    __array_ufunc__ = None  # make numpy scalars defer to __rmul__/__radd__

    def __init__(self, dims: int, coeffs: Mapping[Sequence[int], complex] | None = None,
                 prune: float = PRUNE_TOL):
        if dims < 1:
            raise LaurentError(f"dims must be positive, got {dims}")
        self.dims = int(dims)
        clean: dict[Exponent, complex] = {}
        for alpha, c in (coeffs or {}).items():
            key = tuple(int(a) for a in alpha)
            if len(key) != self.dims:
                raise LaurentError(f"exponent {key} does not have {self.dims} entries")
            c = complex(c)
            if key in clean:
                c += clean[key]
            clean[key] = c
        self._coeffs = {k: v for k, v in clean.items() if abs(v) > prune}

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dims: int) -> "LaurentPoly":
        return cls(dims)

    @classmethod
    def constant(cls, dims: int, value: complex = 1.0) -> "LaurentPoly":
        return cls(dims, {(0,) * dims: value})

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: complex = 1.0) -> "LaurentPoly":
        return cls(len(alpha), {tuple(alpha): coeff})

    @classmethod
    def variable(cls, dims: int, j: int) -> "LaurentPoly":
        alpha = [0] * dims
        alpha[j] = 1
        return cls(dims, {tuple(alpha): 1.0})

    # -- basic protocol ---------------------------------------------------

    @property
    def coeffs(self) -> dict[Exponent, complex]:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, alpha: Sequence[int]) -> complex:
        return self._coeffs.get(tuple(alpha), 0j)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def support(self) -> list[Exponent]:
        return sorted(self._coeffs)

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"LaurentPoly({self.dims}, 0)"
        terms = []
        for alpha in sorted(self._coeffs, key=grlex_key, reverse=True):
            c = self._coeffs[alpha]
            mono = "*".join(f"z{j + 1}^{a}" for j, a in enumerate(alpha) if a) or "1"
            terms.append(f"({c.real:.6g}{c.imag:+.6g}j)*{mono}")
        return " + ".join(terms)

    def _check(self, other: "LaurentPoly") -> None:
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.dims != self.dims:
            raise LaurentError(f"dimension mismatch: {self.dims} vs {other.dims}")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dims, other)
        self._check(other)
        out = dict(self._coeffs)
        for alpha, c in other._coeffs.items():
            out[alpha] = out.get(alpha, 0j) + c
        return LaurentPoly(self.dims, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.dims, {a: -c for a, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: complex) -> "LaurentPoly":
        s = complex(s)
        return LaurentPoly(self.dims, {a: s * c for a, c in self._coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exponent, complex] = {}
        for a, ca in self._coeffs.items():
            for b, cb in other._coeffs.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0j) + ca * cb
        return LaurentPoly(self.dims, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            return divide_exact(self, other)
        return self.scale(1.0 / complex(other))

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int) or k < 0:
            raise LaurentError("only nonnegative integer powers are supported")
        result = LaurentPoly.constant(self.dims)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, beta: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial zeta^beta."""
        return LaurentPoly(self.dims, {tuple(a + b for a, b in zip(alpha, beta)): c
                                       for alpha, c in self._coeffs.items()})

    def conj(self) -> "LaurentPoly":
        """Pointwise complex conjugate on the torus: c zeta^a -> conj(c) zeta^-a."""
        return LaurentPoly(self.dims, {tuple(-a for a in alpha): c.conjugate()
                                       for alpha, c in self._coeffs.items()})

    def inner(self, other: "LaurentPoly") -> complex:
        """L^2(T^d, Haar) inner product <self, other>, linear in the first slot."""
        self._check(other)
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        total = 0j
        for alpha, c in small._coeffs.items():
            d = big._coeffs.get(alpha)
            if d is not None:
                total += c * d.conjugate() if small is self else d * c.conjugate()
        return total

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self._coeffs.values()))

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def distance(self, other: "LaurentPoly") -> float:
        """Largest coefficientwise difference."""
        return (self - other).max_abs_coeff()

    def allclose(self, other: "LaurentPoly", atol: float = 1e-12) -> bool:
        return self.distance(other) <= atol

    # -- evaluation -------------------------------------------------------

    def __call__(self, z: Sequence[complex]) -> complex:
        return self.evaluate(z)

    def evaluate(self, z: Sequence[complex]) -> complex:
        z = [complex(x) for x in z]
        if len(z) != self.dims:
            raise LaurentError(f"point has {len(z)} coordinates, expected {self.dims}")
        total = 0j
        for alpha, c in self._coeffs.items():
            term = c
            for zj, a in zip(z, alpha):
                if a < 0 and zj == 0:
                    raise ZeroDivisionError("negative power evaluated at a zero coordinate")
                term *= zj ** a
            total += term
        return total

    def evaluate_grid(self, points: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at an array of points with shape (..., d)."""
        points = np.asarray(points, dtype=complex)
        out = np.zeros(points.shape[:-1], dtype=complex)
        for alpha, c in self._coeffs.items():
            term = np.full(points.shape[:-1], c, dtype=complex)
            for j, a in enumerate(alpha):
                if a:
                    term = term * points[..., j] ** a
            out += term
        return out

    # -- structure --------------------------------------------------------

    def is_polynomial(self) -> bool:
        return all(min(alpha) >= 0 for alpha in self._coeffs)

    def degree(self) -> int:
        """Largest total degree in the support (0 for the zero polynomial)."""
        return max((sum(a) for a in self._coeffs), default=0)

    def degrees(self) -> set[int]:
        return {sum(a) for a in self._coeffs}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_component(self, k: int) -> "LaurentPoly":
        if not self.is_polynomial():
            raise LaurentError("homogeneous components are defined for polynomials only")
        return LaurentPoly(self.dims, {a: c for a, c in self._coeffs.items() if sum(a) == k})

    def leading_term(self) -> tuple[Exponent, complex]:
        if not self._coeffs:
            raise LaurentError("zero polynomial has no leading term")
        alpha = max(self._coeffs, key=grlex_key)
        return alpha, self._coeffs[alpha]

    def dilate(self, r: float) -> "LaurentPoly":
        """The polynomial z -> f(r z)."""
        return LaurentPoly(self.dims, {a: c * r ** sum(a) for a, c in self._coeffs.items()})

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        terms = [{"alpha": list(alpha), "re": c.real, "im": c.imag}
                 for alpha, c in sorted(self._coeffs.items())]
        return {"dims": self.dims, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LaurentPoly":
        try:
            dims = int(data["dims"])
            coeffs = {}
            for term in data["terms"]:
                key = tuple(int(a) for a in term["alpha"])
                coeffs[key] = coeffs.get(key, 0j) + complex(term.get("re", 0.0), term.get("im", 0.0))
        except (KeyError, TypeError) as exc:
            raise LaurentError(f"malformed LaurentPoly JSON: {exc}") from exc
        return cls(dims, coeffs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LaurentPoly":
        return cls.from_dict(json.loads(text))


def grlex_key(alpha: Sequence[int]) -> tuple:
    return (sum(alpha), tuple(alpha))


def divide_exact(f: LaurentPoly, g: LaurentPoly, rtol: float = DIVISION_RTOL) -> LaurentPoly:
    """Return q with q * g == f, or raise NotDivisibleError.

    Both operands are shifted to polynomials whose exponents have zero
    minimum in every coordinate; an exact Laurent quotient is then a
    polynomial and ordinary division by graded-lex leading terms applies.
    """
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return LaurentPoly.zero(f.dims)
    d = f.dims
    fmin = [min(a[j] for a, _ in f.items()) for j in range(d)]
    gmin = [min(a[j] for a, _ in g.items()) for j in range(d)]
    fs = f.shift([-x for x in fmin])
    gs = g.shift([-x for x in gmin])
    tol = rtol * f.max_abs_coeff()
    lt_alpha, lt_c = gs.leading_term()
    remainder = dict(fs.items())
    quotient: dict[Exponent, complex] = {}
    g_terms = list(gs.items())
    while True:
        live = [a for a, c in remainder.items() if abs(c) > tol]
        if not live:
            break
        alpha = max(live, key=grlex_key)
        beta = tuple(a - b for a, b in zip(alpha, lt_alpha))
        if min(beta) < 0:
            raise NotDivisibleError("leading term of the divisor does not divide the remainder")
        c = remainder[alpha] / lt_c
        quotient[beta] = quotient.get(beta, 0j) + c
        for gamma, cg in g_terms:
            key = tuple(x + y for x, y in zip(beta, gamma))
            remainder[key] = remainder.get(key, 0j) - c * cg
        remainder.pop(alpha, None)
    q = LaurentPoly(d, quotient).shift([a - b for a, b in zip(fmin, gmin)])
    if (q * g - f).max_abs_coeff() > max(tol, PRUNE_TOL):
        raise NotDivisibleError("residual exceeds tolerance")
    return q


def elementary_symmetric(dims: int, k: int, power: int = 1) -> LaurentPoly:
    """E_k(z_1^power, ..., z_d^power)."""
    from itertools import combinations

    coeffs = {}
    for idx in combinations(range(dims), k):
        alpha = [0] * dims
        for j in idx:
            alpha[j] = power
        coeffs[tuple(alpha)] = 1.0
    return LaurentPoly(dims, coeffs)


def torus_grid(q: int, dims: int, offset: float = 0.0) -> np.ndarray:
    """Tensor grid of q-th roots of unity (optionally rotated by offset/q turns)."""
    angles = 2 * np.pi * (np.arange(q) + offset) / q
    axes = np.meshgrid(*([angles] * dims), indexing="ij")
    return np.stack([np.exp(1j * a) for a in axes], axis=-1).reshape(-1, dims)


def from_terms(dims: int, terms: Iterable[tuple[Sequence[int], complex]]) -> LaurentPoly:
    coeffs: dict[Exponent, complex] = {}
    for alpha, c in terms:
        key = tuple(alpha)
        coeffs[key] = coeffs.get(key, 0j) + c
    return LaurentPoly(dims, coeffs)


def substitute_theta(symbol: LaurentPoly, theta: Sequence[LaurentPoly] | object) -> LaurentPoly:
    """Pull a (p, p-bar) symbol back to the torus.

    ``symbol`` has 2d variables ordered (p_1..p_d, pbar_1..pbar_d) with
    nonnegative exponents.  p_j becomes theta_j(zeta) and pbar_j its torus
    conjugate.  ``theta`` is a list of d polynomials or any object with a
    ``theta`` attribute.
    """
    theta = list(getattr(theta, "theta", theta))
    d = len(theta)
    if symbol.dims != 2 * d:
        raise LaurentError(f"(p, pbar) symbol needs {2 * d} variables, got {symbol.dims}")
    if not symbol.is_polynomial():
        raise LaurentError("(p, pbar) symbol must have nonnegative exponents")
    factors = list(theta) + [th.conj() for th in theta]
    cache: dict[tuple[int, int], LaurentPoly] = {}

    def power(j: int, k: int) -> LaurentPoly:
        if (j, k) not in cache:
            cache[(j, k)] = factors[j] ** k
        return cache[(j, k)]

    out = LaurentPoly.zero(d)
    for alpha, c in symbol.items():
        term = LaurentPoly.constant(d, c)
        for j, k in enumerate(alpha):
            if k:
                term = term * power(j, k)
        out = out + term
    return out
