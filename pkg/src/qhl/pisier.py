"""Finite truncations of the Davidson-Paulsen / Pisier construction.

H = (+)_{n=1}^{N} C^{2^n} and l^2(H) is cut to K blocks.  Lower bounds on
norms survive the truncation because they are witnessed on retained blocks;
upper bounds can only shrink.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import numerics
from .groups import QuotientContext
from .laurent import LaurentPoly

MAX_CC_LEVEL = 6
MAX_ISO_LEVEL = 12


def coefficient(k: int) -> float:
    """a_k = (k+1)^{-3/2}."""
    return (k + 1) ** -1.5


@dataclass(frozen=True)
class PisierParams:
    m: int = 1
    n: int = 1
    N_trunc: int | None = None
    K_trunc: int = 8

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if self.N_trunc is None:
            object.__setattr__(self, "N_trunc", self.m * self.n)
        if self.N_trunc < self.m * self.n:
            raise ValueError(f"N_trunc={self.N_trunc} must be at least m*n={self.m * self.n}")
        if self.K_trunc < 2:
            raise ValueError("K_trunc must be at least 2")

    @property
    def dim_H(self) -> int:
        return 2 ** (self.N_trunc + 1) - 2


def base_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    V = np.array([[1, 0], [0, -1]], dtype=float)
    C = np.array([[0, 0], [1, 0]], dtype=float)
    E11 = np.array([[1, 0], [0, 0]], dtype=float)
    E22 = np.array([[0, 0], [0, 1]], dtype=float)
    return V, C, E11, E22


def base_identities() -> dict[str, float]:
    V, C, E11, E22 = base_matrices()
    I2 = np.eye(2)
    checks = {
        "V^2 = I": V @ V - I2,
        "C^2 = 0": C @ C,
        "CV = C": C @ V - C,
        "VC = -C": V @ C + C,
        "C*C = E11": C.T @ C - E11,
        "CC* = E22": C @ C.T - E22,
        "E11 + E22 = I": E11 + E22 - I2,
    }
    return {k: float(np.max(np.abs(v))) for k, v in checks.items()}


def _kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1))
    for f in factors:
        out = numerics.kron(out, f)
    return out


@lru_cache(maxsize=None)
def _build_C_cached(i: int, n: int) -> np.ndarray:
    V, C, _, _ = base_matrices()
    out = _kron_all([V] * i + [C] + [np.eye(2)] * (n - i - 1))
    out.setflags(write=False)
    return out


def build_C(i: int, n: int) -> np.ndarray:
    """C_i = V^{(x)i} (x) C (x) I^{(x)(n-i-1)} on C^{2^n}."""
    if not 0 <= i < n:
        raise IndexError(f"need 0 <= i < n, got i={i}, n={n}")
    return _build_C_cached(i, n)


def build_P(i: int, N_trunc: int) -> np.ndarray:
    """Projection onto the blocks n <= i of the truncated H."""
    dims = [2 ** n for n in range(1, N_trunc + 1)]
    diag = np.concatenate([np.full(dn, 1.0 if n <= i else 0.0) for n, dn in enumerate(dims, start=1)])
    return np.diag(diag)


def build_W(i: int, N_trunc: int) -> np.ndarray:
    """W_i = (+)_{n=1}^{N} C_{i,n} with C_{i,n} = 0 for i >= n."""
    if N_trunc < 1:
        raise ValueError("N_trunc must be positive")
    total = 2 ** (N_trunc + 1) - 2
    W = np.zeros((total, total))
    off = 0
    for n in range(1, N_trunc + 1):
        dn = 2 ** n
        if i < n:
            W[off:off + dn, off:off + dn] = build_C(i, n)
        off += dn
    return W


def step1_relations(n: int) -> dict[str, float]:
    """Max residuals of C_i^2 = 0, C_i*C_i, C_iC_i*, and the anticommutators."""
    _, _, E11, E22 = base_matrices()
    I2 = np.eye(2)
    res = {"(i)": 0.0, "(ii)": 0.0, "(iii)": 0.0, "(iv)": 0.0}
    for i in range(n):
        Ci = build_C(i, n)
        res["(i)"] = max(res["(i)"], float(np.max(np.abs(Ci @ Ci))))
        e11 = _kron_all([I2] * i + [E11] + [I2] * (n - i - 1))
        e22 = _kron_all([I2] * i + [E22] + [I2] * (n - i - 1))
        res["(ii)"] = max(res["(ii)"], float(np.max(np.abs(Ci.T @ Ci - e11))))
        res["(iii)"] = max(res["(iii)"], float(np.max(np.abs(Ci @ Ci.T - e22))))
        for j in range(i + 1, n):
            Cj = build_C(j, n)
            r = max(np.max(np.abs(Ci @ Cj + Cj @ Ci)), np.max(np.abs(Ci @ Cj.T + Cj.T @ Ci)))
            res["(iv)"] = max(res["(iv)"], float(r))
    return res


def w_relations(N_trunc: int, imax: int | None = None) -> dict[str, float]:
    """W_iW_j + W_jW_i = 0 and W_iW_j* + W_j*W_i = delta_ij (I - P_i) on the truncation."""
    imax = N_trunc if imax is None else imax
    Ws = [build_W(i, N_trunc) for i in range(imax)]
    eye = np.eye(Ws[0].shape[0])
    anti = star = 0.0
    for i in range(imax):
        for j in range(imax):
            anti = max(anti, float(np.max(np.abs(Ws[i] @ Ws[j] + Ws[j] @ Ws[i]))))
            target = (eye - build_P(i, N_trunc)) if i == j else 0.0
            star = max(star, float(np.max(np.abs(Ws[i] @ Ws[j].T + Ws[j].T @ Ws[i] - target))))
    return {"(iii)": anti, "(iv)": star}


def cc_norm_check(a: Sequence[complex], n: int) -> tuple[float, float, float]:
    """(||sum a_i C_i (x) C_i||, 1/2 sum|a_i|, sum|a_i|)."""
    if n > MAX_CC_LEVEL:
        raise ValueError(f"level n={n} exceeds the guard n <= {MAX_CC_LEVEL} (matrix of size 4^n)")
    if len(a) > n:
        raise ValueError(f"{len(a)} coefficients given for level n={n}")
    dim = 4 ** n
    M = np.zeros((dim, dim), dtype=complex)
    for i, ai in enumerate(a):
        if ai:
            Ci = build_C(i, n)
            M += ai * numerics.kron(Ci, Ci)
    s = float(np.sum(np.abs(a)))
    norm = numerics.opnorm(M) if s else 0.0
    return norm, 0.5 * s, s


def iso_map(alpha: Sequence[complex], mn: int) -> np.ndarray:
    """sum alpha_i C_{i, mn}."""
    if mn > MAX_ISO_LEVEL:
        raise ValueError(f"level mn={mn} exceeds the guard mn <= {MAX_ISO_LEVEL}")
    if len(alpha) > mn:
        raise ValueError(f"{len(alpha)} coefficients given for level mn={mn}")
    M = np.zeros((2 ** mn, 2 ** mn), dtype=complex)
    for i, al in enumerate(alpha):
        if al:
            M += al * build_C(i, mn)
    return M


def lambda_isometry_check(alpha: Sequence[complex], mn: int) -> float:
    M = iso_map(alpha, mn)
    target = float(np.linalg.norm(np.asarray(alpha, dtype=complex)))
    got = numerics.opnorm(M) if target else 0.0
    return abs(got - target)


def build_S(K: int, dim_h: int) -> np.ndarray:
    return numerics.kron(np.eye(K, k=-1), np.eye(dim_h))


def build_X(K: int, N_trunc: int, shift: int = 0, scale: int = 1) -> np.ndarray:
    """Block Hankel (scale * a_{i+j+shift} W_{i+j+shift})_{i,j<K}."""
    dim_h = 2 ** (N_trunc + 1) - 2
    Ws = {}
    X = np.zeros((K * dim_h, K * dim_h))
    for i in range(K):
        for j in range(K):
            k = i + j + shift
            if k >= N_trunc:
                continue  # W_k vanishes on the truncation
            if k not in Ws:
                Ws[k] = build_W(k, N_trunc)
            X[i * dim_h:(i + 1) * dim_h, j * dim_h:(j + 1) * dim_h] = scale * coefficient(k) * Ws[k]
    return X


def build_F(params: PisierParams) -> dict[str, np.ndarray]:
    """F = [[S*, X], [0, S]] together with its blocks."""
    K, N = params.K_trunc, params.N_trunc
    dim_h = params.dim_H
    if 2 * K * dim_h > 8192:
        raise ValueError(f"F would have dimension {2 * K * dim_h} > 8192")
    S = build_S(K, dim_h)
    X = build_X(K, N)
    F = np.block([[S.T, X], [np.zeros_like(S), S]])
    return {"F": F, "S": S, "X": X}


def hankel_intertwining_residual(params: PisierParams) -> float:
    """S*X - XS on rows/cols of block index < K - 1."""
    blocks = build_F(params)
    S, X = blocks["S"], blocks["X"]
    keep = (params.K_trunc - 1) * params.dim_H
    D = S.T @ X - X @ S
    return float(np.max(np.abs(D[:keep, :keep]), initial=0.0))


def delta_map(m: int, n: int) -> dict[int, float]:
    """Coefficients alpha_i of delta_{m,0}^{(2^{mn})}(P) = sum alpha_i C_{i,mn} (x) W_i."""
    return {k * m - 1: (k * m) ** 2 * coefficient(k * m - 1) ** 2 for k in range(1, n + 1)}


def delta_matrix_blocks(m: int, n: int, N_trunc: int | None = None):
    """Yield the diagonal blocks of delta(P) over the W-decomposition H = (+) C^{2^n'}.

    sum alpha_i C_{i,mn} (x) W_i = (+)_{n'} sum_{i<n'} alpha_i C_{i,mn} (x) C_{i,n'},
    so the full 2^{mn} * dim(H) matrix is never formed.
    """
    N_trunc = m * n if N_trunc is None else N_trunc
    alphas = delta_map(m, n)
    mn = m * n
    for n2 in range(1, N_trunc + 1):
        dim = 2 ** mn * 2 ** n2
        B = np.zeros((dim, dim))
        for i, al in alphas.items():
            if i < n2:
                B += al * numerics.kron(build_C(i, mn), build_C(i, n2))
        yield n2, B


def p_norm_sup(m: int, n: int, samples: int = 16) -> float:
    """max over sample points of ||p(z)||, p(z) = sum_k km conj(a_{km-1}) C_{km-1,mn} z^{km}."""
    mn = m * n
    best = 0.0
    for s in range(samples):
        z = np.exp(2j * np.pi * s / samples)
        alpha = np.zeros(mn, dtype=complex)
        for k in range(1, n + 1):
            alpha[k * m - 1] = k * m * coefficient(k * m - 1) * z ** (k * m)
        best = max(best, numerics.opnorm(iso_map(alpha, mn)))
    return best


@dataclass
class GrowthReport:
    m: int
    n: int
    delta_norm: float
    p_norm: float
    lhs_ratio: float
    paper_bound: float

    @property
    def margin(self) -> float:
        return self.lhs_ratio - self.paper_bound

    def row(self) -> dict:
        return {"m": self.m, "n": self.n, "lhs_ratio": self.lhs_ratio,
                "paper_bound": self.paper_bound, "margin": self.margin}


def delta_growth_experiment(m: int, n: int, N_trunc: int | None = None) -> GrowthReport:
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if m * n > 6:
        raise ValueError(f"m*n={m * n} exceeds the guard m*n <= 6")
    N_trunc = m * n if N_trunc is None else N_trunc
    if N_trunc < m * n:
        raise ValueError(f"N_trunc={N_trunc} must be at least m*n={m * n}")
    # blocks above the SVD limit fall back to power iteration, still a lower bound
    delta_norm = max(numerics.opnorm(B) for _, B in delta_matrix_blocks(m, n, N_trunc))
    p_norm = math.sqrt(sum(delta_map(m, n).values()))
    bound = 0.5 * math.sqrt(sum(1.0 / k for k in range(1, n + 1)) / m)
    return GrowthReport(m, n, delta_norm, p_norm, delta_norm / p_norm, bound)


def diagonal_polynomial(theta: LaurentPoly) -> np.ndarray:
    """Coefficients (ascending) of z -> theta(z, ..., z)."""
    deg = theta.degree()
    out = np.zeros(deg + 1, dtype=complex)
    for alpha, c in theta.items():
        out[sum(alpha)] += c
    return out


def theta_module_action(T: np.ndarray, g: LaurentPoly, ctx: QuotientContext) -> np.ndarray:
    """g(T_1, ..., T_d) with T_j = theta_j(T, ..., T), i.e. r(T) for r(z) = g(theta(z, ..., z))."""
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError("T must be square")
    if g.dims != ctx.d or not g.is_polynomial():
        raise ValueError(f"g must be a polynomial in {ctx.d} variables p_1..p_d")
    diag = [diagonal_polynomial(th) for th in ctx.theta]
    r = np.zeros(1, dtype=complex)
    for alpha, c in g.items():
        term = np.array([c], dtype=complex)
        for dj, k in zip(diag, alpha):
            for _ in range(k):
                term = np.polynomial.polynomial.polymul(term, dj)
        r = np.polynomial.polynomial.polyadd(r, term)
    out = np.zeros(T.shape, dtype=np.result_type(T, complex))
    for k, ck in enumerate(r):
        if ck != 0:
            out += ck * np.linalg.matrix_power(T, k)
    return out


def matrix_to_json(M: np.ndarray) -> str:
    M = np.asarray(M)
    return json.dumps({"rows": list(range(M.shape[0])), "cols": list(range(M.shape[1])),
                       "entries": [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in M]})
