"""Integer utilities and the dense matrix/vector substrate.

Matrices are plain 2-D float64 numpy arrays, vectors 1-D.  Dimension
bookkeeping is done in Python ints and every derived dimension is checked
against ``DIM_LIMIT``: least-common-multiple recursions can legitimately
explode, and the overflow error is the designed stop.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionOverflowError,
    ShapeMismatchError,
    SingularMatrixError,
)

#: Largest admissible dimension for any vector length or matrix side.
DIM_LIMIT = 2**31


def check_dim(n: int, context: str = "dimension") -> int:
    """Validate a derived dimension, raising the designed overflow stop."""
    if n > DIM_LIMIT:
        raise DimensionOverflowError(
            f"{context} {n} exceeds the supported limit 2^31"
        )
    return n


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array with positive sides and finite entries."""
    A = np.asarray(a, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeMismatchError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def as_vector(x) -> np.ndarray:
    """Coerce to a 1-D float64 array with positive length and finite entries."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ShapeMismatchError(f"expected a nonempty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def gcd_lcm(a: int, b: int) -> tuple[int, int]:
    """Greatest common divisor and least common multiple of two positive ints.

    The lcm is computed as ``a // gcd * b`` so the intermediate cannot
    overflow before the limit check.
    """
    if a < 1 or b < 1:
        raise ValueError("gcd_lcm arguments must be positive integers")
    g = math.gcd(a, b)
    l = a // g * b
    check_dim(l, "lcm")
    return g, l


def kron_identity(A, s: int) -> np.ndarray:
    """Materialized Kronecker lift A -> A (x) I_s."""
    A = as_matrix(A)
    if s < 1:
        raise ValueError("Kronecker factor must be >= 1")
    check_dim(A.shape[0] * s, "rows")
    check_dim(A.shape[1] * s, "cols")
    if s == 1:
        return A.copy()
    return np.kron(A, np.eye(s))


def kron_ones(x, s: int) -> np.ndarray:
    """Vector lift x -> x (x) 1_s: each entry repeated s times consecutively."""
    x = as_vector(x)
    if s < 1:
        raise ValueError("Kronecker factor must be >= 1")
    check_dim(x.shape[0] * s, "dim")
    return np.repeat(x, s)


def kron_ones_mat(B, s: int) -> np.ndarray:
    """Matrix lift B -> B (x) 1_s (column of ones): each row repeated s times."""
    B = as_matrix(B)
    if s < 1:
        raise ValueError("Kronecker factor must be >= 1")
    check_dim(B.shape[0] * s, "rows")
    return np.repeat(B, s, axis=0)


def apply_kron_identity(A: np.ndarray, s: int, X: np.ndarray) -> np.ndarray:
    """Compute (A (x) I_s) @ X without materializing the lift.

    X may be a vector of length cols(A)*s or a matrix with that many rows.
    Agrees with the materialized product; the materialized path stays
    available through :func:`kron_identity` for reference checks.
    """
    m, n = A.shape
    if X.ndim == 1:
        if X.shape[0] != n * s:
            raise ShapeMismatchError("operand length does not match lifted matrix")
        return (A @ X.reshape(n, s)).reshape(-1)
    if X.shape[0] != n * s:
        raise ShapeMismatchError("operand rows do not match lifted matrix")
    q = X.shape[1]
    out = np.einsum("ij,jsq->isq", A, X.reshape(n, s, q))
    return out.reshape(m * s, q)


def mat_mul(A, B) -> np.ndarray:
    """Conventional matrix product with an explicit conformability check."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ShapeMismatchError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def mat_add(A, B) -> np.ndarray:
    """Conventional same-shape matrix addition."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ShapeMismatchError(f"cannot add {A.shape} to {B.shape}")
    return A + B


def mat_scale(c: float, A) -> np.ndarray:
    return float(c) * as_matrix(A)


def mat_transpose(A) -> np.ndarray:
    return as_matrix(A).T.copy()


def mat_inverse(A) -> np.ndarray:
    """Invert a square matrix by Gauss-Jordan elimination, partial pivoting.

    A pivot below ``1e-12 * max|entry|`` is treated as a zero pivot.
    """
    A = as_matrix(A)
    n, m = A.shape
    if n != m:
        raise ShapeMismatchError("mat_inverse requires a square matrix")
    scale = float(np.abs(A).max())
    if scale == 0.0:
        raise SingularMatrixError("zero matrix is singular")
    M = np.hstack([A.copy(), np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        if abs(M[piv, col]) < 1e-12 * scale:
            raise SingularMatrixError(
                f"pivot magnitude {abs(M[piv, col]):.3e} below 1e-12 * max|entry|"
            )
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        M[col] /= M[col, col]
        mask = np.arange(n) != col
        M[mask] -= np.outer(M[mask, col], M[col])
    return M[:, n:]


def spectral_norm(A, rel_tol: float = 1e-12, max_iter: int = 10000) -> float:
    """Largest singular value via power iteration on A^T A."""
    A = as_matrix(A)
    G = A.T @ A
    if not np.any(G):
        return 0.0
    n = G.shape[0]
    v = np.random.default_rng(0x5EED).standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = 0.0
    restarted = False
    for _ in range(max_iter):
        w = G @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # start vector landed in the kernel; restart once from the
            # dominant diagonal direction
            if restarted:
                raise ConvergenceError("power iteration stuck in the kernel")
            v = np.zeros(n)
            v[int(np.argmax(np.diag(G)))] = 1.0
            lam_prev = 0.0
            restarted = True
            continue
        v = w / nw
        lam = float(v @ (G @ v))
        if abs(lam - lam_prev) <= rel_tol * lam:
            return math.sqrt(lam)
        lam_prev = lam
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations"
    )
