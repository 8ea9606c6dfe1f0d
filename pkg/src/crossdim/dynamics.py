"""Trajectory solvers and dimension analysis for uncontrolled linear systems.

Discrete systems iterate the V-product; the state dimension follows a
purely arithmetic recursion that, for a dimension-bounded operator (rows
dividing columns), reaches a fixed point r_star after finitely many steps.
On the invariant dimension the operator acts as an ordinary square matrix
(its restriction), which is what makes closed-form continuous solutions
possible: the trajectory splits into a finite V-sum of transient terms plus
a phi-function applied to the state that has entered the invariant space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.linalg import expm

from .arith import DIM_LIMIT, as_matrix, as_vector, check_dim, gcd_lcm, mat_inverse
from .errors import (
    DimensionOverflowError,
    InvarianceError,
    NotDimensionBoundedError,
    ShapeMismatchError,
)
from .stp import op_norm_v, v_add, v_product, v_product_mat

Schedule = Union[np.ndarray, Sequence[np.ndarray], Callable[[int], np.ndarray]]


@dataclass(frozen=True)
class DimensionProfile:
    """Dimension sequence of a trajectory and its entry into the invariant space.

    ``r_seq`` holds r_0 .. r_{i_star}; from index ``i_star`` on the dimension
    stays at ``r_star``.
    """

    k: int
    mu_x: int
    r_seq: tuple[int, ...]
    i_star: int
    r_star: int


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    """One state along a trajectory: step index or time, plus the state vector."""

    t: float
    state: np.ndarray


def is_dimension_bounded(A) -> bool:
    """True when rows divide columns, i.e. trajectories reach a fixed dimension."""
    A = as_matrix(A)
    return A.shape[1] % A.shape[0] == 0


def _bounded_shape(A) -> tuple[int, int]:
    A = as_matrix(A)
    k, n = A.shape
    if n % k != 0:
        raise NotDimensionBoundedError(
            f"{k}x{n} operator is not dimension-bounded (rows must divide columns)"
        )
    return k, n // k


def dimension_profile(A, r0: int) -> DimensionProfile:
    """Dimension recursion from an initial state dimension to its fixed point.

    xi_0 = lcm(r_0, k*mu_x) / (k*mu_x), then r_i = k*xi_{i-1} and
    xi_i = lcm(xi_{i-1}, mu_x) / mu_x until the dimension repeats.
    """
    k, mu_x = _bounded_shape(A)
    if r0 < 1:
        raise ValueError("initial dimension must be positive")
    _, t = gcd_lcm(r0, k * mu_x)
    xi = t // (k * mu_x)
    r_seq = [r0]
    r = xi * k
    while r != r_seq[-1]:
        check_dim(r)
        r_seq.append(r)
        xi = xi // math.gcd(xi, mu_x)
        r = xi * k
    return DimensionProfile(
        k=k, mu_x=mu_x, r_seq=tuple(r_seq), i_star=len(r_seq) - 1, r_star=r_seq[-1]
    )


def is_invariant_dim(A, r: int) -> bool:
    """Whether states of dimension r keep dimension r under the V-product."""
    k, mu_x = _bounded_shape(A)
    if r < 1:
        raise ValueError("dimension must be positive")
    _, t = gcd_lcm(r, k * mu_x)
    return r == t // mu_x


def restriction(A, r: int) -> np.ndarray:
    """The r-by-r matrix representing A on an invariant dimension.

    Equals ``(A (x) I_{r/k}) @ (I_r (x) 1_{mu_x})``; column i is the
    V-product of A with the i-th standard basis vector.
    """
    A = as_matrix(A)
    if not is_invariant_dim(A, r):
        raise InvarianceError(f"dimension {r} is not invariant for {A.shape} operator")
    return v_product_mat(A, np.eye(r))


def _as_schedule(A_schedule: Schedule) -> Callable[[int], np.ndarray]:
    if callable(A_schedule):
        return lambda t: as_matrix(A_schedule(t))
    if isinstance(A_schedule, np.ndarray):
        A = as_matrix(A_schedule)
        return lambda t: A
    mats = [as_matrix(M) for M in A_schedule]
    if not mats:
        raise ValueError("empty schedule")
    return lambda t: mats[t % len(mats)]


def simulate_discrete(
    A_schedule: Schedule, x0, steps: int, max_dim: int = DIM_LIMIT
) -> list[TrajectorySample]:
    """Iterate ``x(t+1) = A(t) |> x(t)`` for the given number of steps.

    ``A_schedule`` is a single matrix, a periodic list (index t mod period),
    or a callable.  Works for non-dimension-bounded operators too, in which
    case the state dimension eventually grows without bound and the run
    stops with a dimension overflow that reports the offending step.
    """
    x = as_vector(x0)
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    sched = _as_schedule(A_schedule)
    samples = [TrajectorySample(t=0, state=x.copy())]
    for t in range(steps):
        A = sched(t)
        _, lift = gcd_lcm(A.shape[1], x.shape[0])
        nxt = A.shape[0] * (lift // A.shape[1])
        if nxt > max_dim:
            raise DimensionOverflowError(
                f"state dimension {nxt} at step {t + 1} exceeds cap {max_dim}",
                step=t + 1,
            )
        x = v_product(A, x)
        samples.append(TrajectorySample(t=t + 1, state=x))
    return samples


# ---------------------------------------------------------------------------
# phi-functions and continuous-time solutions
# ---------------------------------------------------------------------------

MAX_PHI_ORDER = 64


def phi_functions(M, t: float, s: int) -> np.ndarray:
    """phi_s(M*t), where phi_s(Z) = sum_{j>=0} Z^j / (j+s)!.

    phi_0 is the matrix exponential; for s >= 1 the value is read off the
    top-right block of the exponential of the augmented matrix
    ``[[Z, I, 0...], [0, 0, I...], ...]`` (scaling-and-squaring Pade under
    the hood), so no quadrature and no invertibility assumption is needed.
    The s-fold nested integral of e^{M tau} from 0 to t equals
    ``t^s * phi_s(M t)``.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatchError("phi_functions requires a square matrix")
    if not 0 <= s <= MAX_PHI_ORDER:
        raise ValueError(f"phi order must be in [0, {MAX_PHI_ORDER}]")
    Z = M * float(t)
    if s == 0:
        return expm(Z)
    n = Z.shape[0]
    aug = np.zeros(((s + 1) * n, (s + 1) * n))
    aug[:n, :n] = Z
    for j in range(s):
        aug[j * n : (j + 1) * n, (j + 1) * n : (j + 2) * n] = np.eye(n)
    return expm(aug)[:n, s * n :]


def _transient_states(A: np.ndarray, x0: np.ndarray, count: int) -> list[np.ndarray]:
    xs = [x0]
    for _ in range(count):
        xs.append(v_product(A, xs[-1]))
    return xs


def continuous_solution(A, x0, ts: Sequence[float]) -> list[TrajectorySample]:
    """Exact solution of ``dx/dt = A |> x`` for a dimension-bounded A.

    With s the entry index of the dimension profile, the state is the
    V-sum of the transient terms ``t^j/j! * (A^j |> x0)`` for j < s and the
    invariant-space tail ``t^s * phi_s(A_star t) @ x_s``; exact up to the
    accuracy of the matrix exponential.
    """
    A = as_matrix(A)
    x0 = as_vector(x0)
    prof = dimension_profile(A, x0.shape[0])
    s = prof.i_star
    xs = _transient_states(A, x0, s)
    A_star = restriction(A, prof.r_star)
    samples = []
    for t in ts:
        t = float(t)
        acc = None
        for j in range(s):
            term = (t**j / math.factorial(j)) * xs[j]
            acc = term if acc is None else v_add(acc, term)
        tail = (t**s) * (phi_functions(A_star, t, s) @ xs[s])
        state = tail if acc is None else v_add(acc, tail)
        samples.append(TrajectorySample(t=t, state=state))
    return samples


def continuous_solution_inverse_form(A, x0, ts: Sequence[float]) -> list[TrajectorySample]:
    """Alternative exact path requiring an invertible restriction.

    Converts the invariant-space tail into ``A_star^{-s} e^{A_star t} x_s``
    minus the matching finite prefix.  Agrees with the phi-function path
    wherever both apply; kept as the cross-check of that equivalence.
    """
    A = as_matrix(A)
    x0 = as_vector(x0)
    prof = dimension_profile(A, x0.shape[0])
    s = prof.i_star
    xs = _transient_states(A, x0, s)
    A_star = restriction(A, prof.r_star)
    Ainv_s = np.linalg.matrix_power(mat_inverse(A_star), s)
    r = prof.r_star
    samples = []
    for t in ts:
        t = float(t)
        acc = None
        for j in range(s):
            term = (t**j / math.factorial(j)) * xs[j]
            acc = term if acc is None else v_add(acc, term)
        prefix = np.zeros((r, r))
        P = np.eye(r)
        for j in range(s):
            prefix += (t**j / math.factorial(j)) * P
            P = P @ A_star
        tail = Ainv_s @ (expm(A_star * t) - prefix) @ xs[s]
        state = tail if acc is None else v_add(acc, tail)
        samples.append(TrajectorySample(t=t, state=state))
    return samples


def continuous_solution_truncated(
    A, x0, ts: Sequence[float], order: int = 30, max_dim: int = 2**20
) -> tuple[list[TrajectorySample], list[float]]:
    """Truncated series solution for a not dimension-bounded operator.

    Folds ``sum_{i<=order} t^i/i! * (A^i |> x0)`` by V-addition.  State
    dimensions grow with every power, so the fold is capped at ``max_dim``.
    Returns the samples together with the per-sample truncation bound
    ``tail(|t| * ||A||) * ||x0||`` in the dimension-free norm; the bound is
    reported, never silently dropped.
    """
    from .poly import _exp_tail
    from .stp import norm_v

    A = as_matrix(A)
    x0 = as_vector(x0)
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    ys = [x0]
    for i in range(order):
        _, lift = gcd_lcm(A.shape[1], ys[-1].shape[0])
        nxt = A.shape[0] * (lift // A.shape[1])
        if nxt > max_dim:
            raise DimensionOverflowError(
                f"power {i + 1} needs dimension {nxt} above cap {max_dim}", step=i + 1
            )
        ys.append(v_product(A, ys[-1]))
    a = op_norm_v(A)
    nx = norm_v(x0)
    samples, bounds = [], []
    for t in ts:
        t = float(t)
        acc = None
        for i, y in enumerate(ys):
            term = (t**i / math.factorial(i)) * y
            if acc is None:
                acc = term
            else:
                _, lift = gcd_lcm(acc.shape[0], term.shape[0])
                if lift > max_dim:
                    raise DimensionOverflowError(
                        f"V-sum dimension {lift} above cap {max_dim}", step=i
                    )
                acc = v_add(acc, term)
        samples.append(TrajectorySample(t=t, state=acc))
        bounds.append(_exp_tail(a * abs(t), order) * nx)
    return samples, bounds
