"""Cross-dimensional matrix/vector operations and the metric structure.

All four operations lift their operands by Kronecker factors to the least
common multiple of the mismatched dimensions and then combine them
conventionally:

* ``m_product``   A |x| B   lifts both sides with identity blocks,
* ``v_product``   A |>  x   lifts the matrix with identity blocks and the
  vector by entry repetition,
* ``m_add``       A [+] B   adds within one row/column ratio class,
* ``v_add``       x [+] y   adds vectors of any two dimensions.

Whenever the ordinary conformability condition already holds, every one of
them degenerates to the ordinary product or sum.  The inner product, norms
and distance normalize by the lifted dimension, which makes them invariant
under the lifts; distance zero is exactly cross-dimensional equivalence.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .arith import (
    apply_kron_identity,
    as_matrix,
    as_vector,
    check_dim,
    gcd_lcm,
    kron_identity,
    kron_ones,
    kron_ones_mat,
    spectral_norm,
)
from .errors import ShapeClassMismatchError


def shape_class(A) -> Fraction:
    """Reduced rows/cols ratio: the class an m-by-n matrix belongs to."""
    A = as_matrix(A)
    return Fraction(A.shape[0], A.shape[1])


def m_product(A, B) -> np.ndarray:
    """Semi-tensor (M-) product of two matrices of arbitrary shapes.

    With t the lcm of cols(A) and rows(B), computes
    ``(A (x) I_{t/cols(A)}) @ (B (x) I_{t/rows(B)})``.  The result is
    ``(rows(A) * t/cols(A)) x (cols(B) * t/rows(B))``; when
    cols(A) == rows(B) this is the conventional product.
    """
    A, B = as_matrix(A), as_matrix(B)
    n, p = A.shape[1], B.shape[0]
    _, t = gcd_lcm(n, p)
    check_dim(A.shape[0] * (t // n), "rows")
    check_dim(B.shape[1] * (t // p), "cols")
    right = kron_identity(B, t // p)
    return apply_kron_identity(A, t // n, right)


def v_product(A, x) -> np.ndarray:
    """Vector (V-) product: the action of a matrix on a vector.

    With t the lcm of cols(A) and dim(x), computes
    ``(A (x) I_{t/cols(A)}) @ (x (x) 1_{t/dim(x)})``; length
    ``rows(A) * t/cols(A)``.  Coincides with ``A @ x`` when dimensions match.
    """
    A, x = as_matrix(A), as_vector(x)
    n, r = A.shape[1], x.shape[0]
    _, t = gcd_lcm(n, r)
    check_dim(A.shape[0] * (t // n), "dim")
    return apply_kron_identity(A, t // n, kron_ones(x, t // r))


def v_product_mat(A, B) -> np.ndarray:
    """V-product of a matrix with a matrix, treating B's columns as vectors.

    With t the lcm of cols(A) and rows(B), computes
    ``(A (x) I_{t/cols(A)}) @ (B (x) 1_{t/rows(B)})``.
    """
    A, B = as_matrix(A), as_matrix(B)
    n, r = A.shape[1], B.shape[0]
    _, t = gcd_lcm(n, r)
    check_dim(A.shape[0] * (t // n), "rows")
    return apply_kron_identity(A, t // n, kron_ones_mat(B, t // r))


def m_add(A, B) -> np.ndarray:
    """M-addition within one shape class.

    Requires equal reduced rows/cols ratios; lifts both operands with
    identity Kronecker factors to the lcm of the row counts and adds.
    """
    A, B = as_matrix(A), as_matrix(B)
    if shape_class(A) != shape_class(B):
        raise ShapeClassMismatchError(
            f"cannot M-add shape classes {shape_class(A)} and {shape_class(B)}"
        )
    _, t = gcd_lcm(A.shape[0], B.shape[0])
    return kron_identity(A, t // A.shape[0]) + kron_identity(B, t // B.shape[0])


def m_sub(A, B) -> np.ndarray:
    """M-subtraction: ``m_add(A, -B)``."""
    return m_add(A, -as_matrix(B))


def v_add(x, y) -> np.ndarray:
    """V-addition of two vectors of arbitrary dimensions.

    With t the lcm of the dimensions, adds ``x (x) 1_{t/dim(x)}`` and
    ``y (x) 1_{t/dim(y)}``.
    """
    x, y = as_vector(x), as_vector(y)
    _, t = gcd_lcm(x.shape[0], y.shape[0])
    return kron_ones(x, t // x.shape[0]) + kron_ones(y, t // y.shape[0])


def v_sub(x, y) -> np.ndarray:
    """V-subtraction: ``v_add(x, -y)``."""
    return v_add(x, -as_vector(y))


def inner_v(x, y) -> float:
    """Dimension-normalized inner product ``<x, y> / t`` after the lifts."""
    x, y = as_vector(x), as_vector(y)
    _, t = gcd_lcm(x.shape[0], y.shape[0])
    xt = kron_ones(x, t // x.shape[0])
    yt = kron_ones(y, t // y.shape[0])
    return float(xt @ yt) / t


def norm_v(x) -> float:
    """Root mean square norm; invariant under x -> x (x) 1_s."""
    x = as_vector(x)
    return math.sqrt(float(x @ x) / x.shape[0])


def op_norm_v(A) -> float:
    """Operator norm of A acting by V-product: sqrt(n/m) * sigma_max(A)."""
    A = as_matrix(A)
    m, n = A.shape
    return math.sqrt(n / m) * spectral_norm(A)


def dist_v(x, y) -> float:
    """Distance ``norm_v(x [-] y)``; zero exactly on equivalent vectors."""
    return norm_v(v_sub(x, y))
