"""Dense linear-algebra kernels shared by the solver, metrics, and diagnostics.

All kernels validate their inputs on entry (finite, correctly shaped) and
raise instead of propagating NaN/Inf. Factorizations are thin wrappers over
LAPACK via numpy/scipy; the contracts they must satisfy (reconstruction and
residual bounds, rank tolerance) are pinned by the test suite.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

__all__ = [
    "NumericalError",
    "SvdResult",
    "EigResult",
    "MatrixNorms",
    "as_matrix",
    "svd",
    "sym_eig",
    "shrink",
    "solve_spd",
    "numerical_rank",
    "norms",
]

_EPS = np.finfo(np.float64).eps


class NumericalError(RuntimeError):
    """A factorization failed (SVD non-convergence, non-SPD solve)."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row/column, all finite."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD A = U diag(s) V^T with s non-increasing, U/V column-orthonormal."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


@dataclass(frozen=True)
class EigResult:
    """Symmetric eigendecomposition A = Q diag(w) Q^T with Q orthogonal."""

    Q: np.ndarray
    eigenvalues: np.ndarray


class MatrixNorms(NamedTuple):
    frobenius: float
    l1: float
    nuclear: float


def svd(a) -> SvdResult:
    """Thin singular value decomposition.

    Raises NumericalError if the underlying iteration fails to converge.
    """
    A = as_matrix(a)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {A.shape} input") from exc
    return SvdResult(U=U, singular_values=s, V=Vt.T)


def sym_eig(a) -> EigResult:
    """Eigendecomposition of a symmetric matrix.

    Rejects asymmetric input (tolerance 1e-10 relative to the largest entry)
    rather than silently symmetrizing.
    """
    A = as_matrix(a)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"sym_eig requires a square matrix, got {A.shape}")
    tol = 1e-10 * max(1.0, float(np.abs(A).max()))
    if float(np.abs(A - A.T).max()) > tol:
        raise ValueError("sym_eig requires a symmetric matrix")
    try:
        w, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed for {A.shape} input") from exc
    return EigResult(Q=Q, eigenvalues=w)


def shrink(a, eps):
    """Soft-thresholding: shrink magnitudes by ``eps`` and zero the band [-eps, eps].

    Elementwise on arrays; sign is preserved and |shrink(a, eps)| = max(0, |a| - eps).
    """
    if eps < 0:
        raise ValueError(f"shrink threshold must be non-negative, got {eps}")
    out = np.sign(a) * np.maximum(np.abs(a) - eps, 0.0)
    if np.ndim(a) == 0:
        return float(out)
    return out


def solve_spd(a, b) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A via Cholesky.

    Raises NumericalError when the factorization fails (A not SPD).
    """
    A = as_matrix(a, "A")
    B = as_matrix(b, "B")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"solve_spd requires square A, got {A.shape}")
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"incompatible shapes A {A.shape}, B {B.shape}")
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Cholesky factorization failed; matrix is not SPD") from exc
    return scipy.linalg.cho_solve(factor, B)


def numerical_rank(a) -> int:
    """Count of singular values above max(rows, cols) * eps * sigma_max."""
    A = as_matrix(a)
    s = np.linalg.svd(A, compute_uv=False)
    tol = max(A.shape) * _EPS * s[0]
    return int(np.count_nonzero(s > tol))


def norms(a) -> MatrixNorms:
    """Frobenius, elementwise l1, and nuclear (sum of singular values) norms."""
    A = as_matrix(a)
    s = np.linalg.svd(A, compute_uv=False)
    return MatrixNorms(
        frobenius=float(np.linalg.norm(A, "fro")),
        l1=float(np.abs(A).sum()),
        nuclear=float(s.sum()),
    )
