"""Dense complex linear algebra shared by the operator and Pisier modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SVD_MAX_DIM = 2000
POWER_TOL = 1e-9
POWER_MAXITER = 5000
POWER_SEED = 42


class EmptyMatrixError(ValueError):
    pass


@dataclass
class SvdResult:
    s: np.ndarray
    u: np.ndarray | None = None
    vh: np.ndarray | None = None

    @property
    def norm(self) -> float:
        return float(self.s[0]) if len(self.s) else 0.0


def _as_matrix(M) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim != 2 or A.size == 0:
        raise EmptyMatrixError(f"expected a nonempty matrix, got shape {A.shape}")
    return A


def singular_values(M, factors: bool = False) -> SvdResult:
    A = _as_matrix(M)
    if factors:
        u, s, vh = np.linalg.svd(A, full_matrices=False)
        return SvdResult(s, u, vh)
    return SvdResult(np.linalg.svd(A, compute_uv=False))


def power_iteration(M, tol: float = POWER_TOL, maxiter: int = POWER_MAXITER,
                    seed: int = POWER_SEED) -> tuple[float, int]:
    """Largest singular value by power iteration on A^H A; returns (sigma, iterations)."""
    A = _as_matrix(M)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1])
    if np.iscomplexobj(A):
        x = x + 1j * rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    AH = np.ascontiguousarray(A.conj().T)
    lam = 0.0
    for it in range(1, maxiter + 1):
        y = AH @ (A @ x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0, it
        x = y / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam)), it


def opnorm(M) -> float:
    A = _as_matrix(M)
    if min(A.shape) <= SVD_MAX_DIM:
        return float(np.linalg.norm(A, 2))
    return power_iteration(A)[0]


def kron(A, B) -> np.ndarray:
    return np.kron(A, B)


def numerical_rank(M, tol: float = 1e-8) -> int:
    if not 0 < tol < 1:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    s = singular_values(M).s
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
