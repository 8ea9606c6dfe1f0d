"""Canonical representatives for vector and matrix equivalence classes.

Two vectors are equivalent when they become equal after repetition lifts
(x (x) 1_a == y (x) 1_b); two matrices when they match after identity lifts
(A (x) I_a == B (x) I_b).  Each class contains a unique minimal-dimension
element, found here by scanning divisors of the dimension from largest to
smallest and testing the corresponding block pattern.  Quotient-level
arithmetic applies the representative-level operation and reduces again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import as_matrix, as_vector, kron_identity
from .stp import m_add, m_product, norm_v, op_norm_v, v_add, v_product

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VecClass:
    """Equivalence class of a vector, held by its irreducible representative."""

    rep: np.ndarray

    @property
    def dim(self) -> int:
        return self.rep.shape[0]


@dataclass(frozen=True, eq=False)
class MatClass:
    """Equivalence class of a matrix, held by its irreducible representative."""

    rep: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.rep.shape


def _divisors_desc(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return sorted(small + large, reverse=True)


def reduce_vec(x, tol: float = DEFAULT_TOL) -> VecClass:
    """Smallest z with ``max|x - z (x) 1_a| <= tol``, a = dim(x)/dim(z).

    Scans divisors a of dim(x) in decreasing order and accepts the first
    constant-block pattern; x itself is always a valid fallback (a = 1).
    """
    x = as_vector(x)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    d = x.shape[0]
    for a in _divisors_desc(d):
        blocks = x.reshape(d // a, a)
        z = blocks.mean(axis=1)
        if np.abs(blocks - z[:, None]).max() <= tol:
            return VecClass(rep=z)
    return VecClass(rep=x.copy())


def reduce_mat(A, tol: float = DEFAULT_TOL) -> MatClass:
    """Smallest L with ``max|A - L (x) I_a| <= tol``, a maximal.

    Scans divisors a of gcd(rows, cols) in decreasing order, testing that
    every a-by-a block of A equals a scalar multiple of the identity.
    """
    A = as_matrix(A)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    m, n = A.shape
    for a in _divisors_desc(math.gcd(m, n)):
        if a == 1:
            break
        blocks = A.reshape(m // a, a, n // a, a)
        lam = np.einsum("ikjk->ij", blocks) / a
        if np.abs(A - np.kron(lam, np.eye(a))).max() <= tol:
            return MatClass(rep=lam)
    return MatClass(rep=A.copy())


def vec_equivalent(x, y, tol: float = DEFAULT_TOL) -> bool:
    """True when both reduce to representatives equal within tol."""
    zx = reduce_vec(x, tol).rep
    zy = reduce_vec(y, tol).rep
    return zx.shape == zy.shape and np.abs(zx - zy).max() <= tol


def mat_equivalent(A, B, tol: float = DEFAULT_TOL) -> bool:
    """True when both reduce to representatives equal within tol."""
    ra = reduce_mat(A, tol).rep
    rb = reduce_mat(B, tol).rep
    return ra.shape == rb.shape and np.abs(ra - rb).max() <= tol


def expand_vec(cls: VecClass, dim: int) -> np.ndarray:
    """Representative of the class inside a given admissible dimension."""
    if dim % cls.dim != 0:
        raise ValueError(f"class of dim {cls.dim} has no member of dim {dim}")
    return np.repeat(cls.rep, dim // cls.dim)


def expand_mat(cls: MatClass, rows: int) -> np.ndarray:
    """Representative of the class with the given row count."""
    if rows % cls.shape[0] != 0:
        raise ValueError(f"class with {cls.shape[0]} rows has no member with {rows}")
    return kron_identity(cls.rep, rows // cls.shape[0])


def class_v_product(Abar: MatClass, xbar: VecClass, tol: float = DEFAULT_TOL) -> VecClass:
    """Action on the quotient space, computed through representatives."""
    return reduce_vec(v_product(Abar.rep, xbar.rep), tol)


def class_m_product(Abar: MatClass, Bbar: MatClass, tol: float = DEFAULT_TOL) -> MatClass:
    return reduce_mat(m_product(Abar.rep, Bbar.rep), tol)


def class_m_add(Abar: MatClass, Bbar: MatClass, tol: float = DEFAULT_TOL) -> MatClass:
    # representative-level m_add enforces the equal-ratio precondition
    return reduce_mat(m_add(Abar.rep, Bbar.rep), tol)


def class_v_add(xbar: VecClass, ybar: VecClass, tol: float = DEFAULT_TOL) -> VecClass:
    return reduce_vec(v_add(xbar.rep, ybar.rep), tol)


def class_norm_v(xbar: VecClass) -> float:
    """Class norm; well defined because the norm is lift-invariant."""
    return norm_v(xbar.rep)


def class_op_norm_v(Abar: MatClass) -> float:
    """Class operator norm; well defined for the same reason."""
    return op_norm_v(Abar.rep)


def class_dist(xbar: VecClass, ybar: VecClass) -> float:
    """Distance induced on the quotient space."""
    from .stp import dist_v

    return dist_v(xbar.rep, ybar.rep)
