"""Controlled cross-dimensional systems and their classical reductions.

A controlled system ``x(t+1) = A |> x(t) [+] B u(t)``, ``y = C |> x`` with a
dimension-bounded A collapses, once the trajectory enters its invariant
dimension r_star, to an ordinary square system: the stationary realization
``(A_star, B (x) 1_{r_star/m}, C (x) I_{r_star/m})``.  Controllability and
observability verdicts are Kalman rank tests on that realization; transient
layers get their reachable subspaces by embedding the input directions.

For operators with no invariant dimension at all, the quotient space can
still be invariant: the projective stationary realization detects class
invariance column by column and, when present, returns the square matrix
that reproduces the quotient dynamics through canonical representatives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import qr

from .arith import DIM_LIMIT, as_matrix, as_vector, gcd_lcm, kron_identity, kron_ones_mat
from .dynamics import (
    TrajectorySample,
    continuous_solution,
    dimension_profile,
    phi_functions,
    restriction,
)
from .errors import DimensionOverflowError, ShapeMismatchError
from .quotient import DEFAULT_TOL
from .stp import v_add, v_product, v_product_mat

RANK_RTOL = 1e-9

InputSignal = Union[None, Callable[[int], np.ndarray], Sequence]


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """State matrix plus optional input/output matrices.

    Shapes: A is m-by-n, B m-by-p, C q-by-m; time_kind selects the
    discrete- or continuous-time reading of the same data.
    """

    A: np.ndarray
    B: Optional[np.ndarray] = None
    C: Optional[np.ndarray] = None
    time_kind: str = "discrete"

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A))
        if self.B is not None:
            object.__setattr__(self, "B", as_matrix(self.B))
            if self.B.shape[0] != self.A.shape[0]:
                raise ShapeMismatchError("B must have the same number of rows as A")
        if self.C is not None:
            object.__setattr__(self, "C", as_matrix(self.C))
            if self.C.shape[1] != self.A.shape[0]:
                raise ShapeMismatchError("C must have cols equal to rows of A")
        if self.time_kind not in ("discrete", "continuous"):
            raise ValueError("time_kind must be 'discrete' or 'continuous'")


@dataclass(frozen=True, eq=False)
class StationaryRealization:
    """Square system the cross-dimensional system becomes on V_{r_star}."""

    r_star: int
    A_s: np.ndarray
    B_s: Optional[np.ndarray]
    C_s: Optional[np.ndarray]
    transient_dims: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ReachabilityReport:
    controllable: bool
    rank: int
    basis: list[np.ndarray] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class ObservabilityReport:
    observable: bool
    rank: int
    basis: list[np.ndarray] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class ControlSample:
    """State (and output, when C is present) at one step or time."""

    t: float
    state: np.ndarray
    output: Optional[np.ndarray] = None


def _svd_rank(M: np.ndarray) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > RANK_RTOL * sv[0]))


def _column_basis(M: np.ndarray) -> tuple[int, list[np.ndarray]]:
    """Rank and a basis of the column space made of original columns."""
    rank = _svd_rank(M)
    if rank == 0:
        return 0, []
    _, _, piv = qr(M, mode="economic", pivoting=True)
    return rank, [M[:, j].copy() for j in sorted(piv[:rank])]


def stationary_realization(sys: ControlSystem, r0: int) -> StationaryRealization:
    """Build (A_s, B_s, C_s) on the invariant dimension reached from r0."""
    prof = dimension_profile(sys.A, r0)
    m = sys.A.shape[0]
    s = prof.r_star // m
    A_s = restriction(sys.A, prof.r_star)
    B_s = kron_ones_mat(sys.B, s) if sys.B is not None else None
    C_s = kron_identity(sys.C, s) if sys.C is not None else None
    return StationaryRealization(
        r_star=prof.r_star,
        A_s=A_s,
        B_s=B_s,
        C_s=C_s,
        transient_dims=prof.r_seq[: prof.i_star],
    )


def controllability_matrix(A_s: np.ndarray, B_s: np.ndarray) -> np.ndarray:
    r = A_s.shape[0]
    blocks = []
    P = B_s
    for _ in range(r):
        blocks.append(P)
        P = A_s @ P
    return np.hstack(blocks)


def observability_matrix(A_s: np.ndarray, C_s: np.ndarray) -> np.ndarray:
    r = A_s.shape[0]
    blocks = []
    P = C_s
    for _ in range(r):
        blocks.append(P)
        P = P @ A_s
    return np.vstack(blocks)


def is_controllable(sys: ControlSystem, r0: int) -> ReachabilityReport:
    """Kalman rank test on the stationary realization reached from r0."""
    if sys.B is None:
        raise ValueError("system has no input matrix")
    sr = stationary_realization(sys, r0)
    K = controllability_matrix(sr.A_s, sr.B_s)
    rank, basis = _column_basis(K)
    return ReachabilityReport(controllable=rank == sr.r_star, rank=rank, basis=basis)


def is_observable(sys: ControlSystem, r0: int) -> ObservabilityReport:
    """Kalman observability test on the stationary realization."""
    if sys.C is None:
        raise ValueError("system has no output matrix")
    sr = stationary_realization(sys, r0)
    O = observability_matrix(sr.A_s, sr.C_s)
    rank, basis = _column_basis(O.T)
    return ObservabilityReport(observable=rank == sr.r_star, rank=rank, basis=basis)


def reachable_layer(sys: ControlSystem, r0: int, k: int) -> ReachabilityReport:
    """Reachable subspace of a transient layer, visited exactly once.

    For 0 < k < i_star the reachable directions are
    span{B, A |> B, ..., A^{k-1} |> B} embedded into the layer dimension by
    entry repetition with factor r_k / m.
    """
    if sys.B is None:
        raise ValueError("system has no input matrix")
    prof = dimension_profile(sys.A, r0)
    if not 0 < k < prof.i_star:
        raise ValueError(
            f"layer index must satisfy 0 < k < i_star = {prof.i_star}"
        )
    m = sys.A.shape[0]
    r_k = prof.r_seq[k]
    blocks = []
    P = sys.B
    for _ in range(k):
        blocks.append(P)
        P = v_product_mat(sys.A, P)
    span = np.hstack(blocks)
    rank, basis = _column_basis(span)
    j = r_k // m
    embedded = [np.repeat(b, j) for b in basis]
    return ReachabilityReport(controllable=rank == r_k, rank=rank, basis=embedded)


def _as_input(u: InputSignal, p: int) -> Callable[[int], np.ndarray]:
    if u is None:
        zero = np.zeros(p)
        return lambda t: zero
    if callable(u):
        return lambda t: as_vector(u(t))
    vals = [as_vector(v) for v in u]
    if not vals:
        raise ValueError("empty input sequence")
    # hold the final value once the sequence is exhausted
    return lambda t: vals[t] if t < len(vals) else vals[-1]


def simulate_discrete_control(
    sys: ControlSystem, x0, u: InputSignal, steps: int, max_dim: int = DIM_LIMIT
) -> list[ControlSample]:
    """Iterate ``x(t+1) = A |> x(t) [+] B u(t)``, emitting ``y = C |> x``.

    ``u`` maps the step index to an input vector of dimension cols(B); a
    sequence holds its last value, ``None`` means zero input.
    """
    x = as_vector(x0)
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if sys.B is None and u is not None:
        raise ValueError("input given but the system has no input matrix")
    u_fn = _as_input(u, sys.B.shape[1] if sys.B is not None else 1)

    def out(xv):
        return v_product(sys.C, xv) if sys.C is not None else None

    samples = [ControlSample(t=0, state=x.copy(), output=out(x))]
    for t in range(steps):
        _, lift = gcd_lcm(sys.A.shape[1], x.shape[0])
        nxt = sys.A.shape[0] * (lift // sys.A.shape[1])
        if nxt > max_dim:
            raise DimensionOverflowError(
                f"state dimension {nxt} at step {t + 1} exceeds cap {max_dim}",
                step=t + 1,
            )
        drift = v_product(sys.A, x)
        if sys.B is not None:
            ut = u_fn(t)
            if ut.shape[0] != sys.B.shape[1]:
                raise ShapeMismatchError("input dimension must equal cols(B)")
            x = v_add(drift, sys.B @ ut)
        else:
            x = drift
        samples.append(ControlSample(t=t + 1, state=x, output=out(x)))
    return samples


def _validate_hold(breaks: np.ndarray, values: np.ndarray, p: int):
    if breaks.ndim != 1 or values.ndim != 2 or breaks.shape[0] != values.shape[0]:
        raise ValueError("zero-order hold needs matching breakpoints and values")
    if breaks.shape[0] == 0:
        raise ValueError("empty hold signal")
    if breaks[0] != 0.0:
        raise ValueError("hold breakpoints must start at 0")
    if np.any(np.diff(breaks) <= 0):
        raise ValueError("hold breakpoints must be strictly increasing")
    if values.shape[1] != p:
        raise ValueError("hold values must have cols(B) components")


def continuous_forced_response(
    sys: ControlSystem, x0, u, ts: Sequence[float]
) -> list[ControlSample]:
    """Trajectory of ``dx/dt = A |> x [+] B u`` under a zero-order-hold input.

    The drift is the exact closed-form solution.  The forced term always
    lives on the smallest invariant dimension m = rows(A), because B u does:
    over each hold interval it integrates to a difference of first-order
    phi-functions of the restriction, so the response is exact per interval
    (no quadrature).  The last hold value extends to infinity.
    """
    if sys.B is None:
        raise ValueError("system has no input matrix")
    A = sys.A
    x0 = as_vector(x0)
    m = A.shape[0]
    ts = [float(t) for t in ts]
    if any(t < 0 for t in ts):
        raise ValueError("forced response requires nonnegative times")
    drift = continuous_solution(A, x0, ts)
    A_m = restriction(A, m)

    if u is None:
        breaks = np.array([0.0])
        values = np.zeros((1, sys.B.shape[1]))
    else:
        breaks = np.asarray(u[0], dtype=float)
        values = np.atleast_2d(np.asarray(u[1], dtype=float))
        _validate_hold(breaks, values, sys.B.shape[1])

    def G(sigma: float) -> np.ndarray:
        # integral of e^{A_m rho} over [0, sigma]
        return sigma * phi_functions(A_m, sigma, 1)

    samples = []
    for t, d in zip(ts, drift):
        forced = np.zeros(m)
        for i in range(breaks.shape[0]):
            a = float(breaks[i])
            if a >= t:
                break
            b = float(breaks[i + 1]) if i + 1 < breaks.shape[0] else t
            b = min(b, t)
            seg = G(t - a) if b >= t else G(t - a) - G(t - b)
            forced = forced + seg @ (sys.B @ values[i])
        state = v_add(d.state, forced)
        y = v_product(sys.C, state) if sys.C is not None else None
        samples.append(ControlSample(t=t, state=state, output=y))
    return samples


# ---------------------------------------------------------------------------
# Quotient-space (class-level) invariance and projective realizations
# ---------------------------------------------------------------------------


def _class_invariant_image(A: np.ndarray, w: np.ndarray, r: int, tol: float):
    """Reduce A |> e within W_g and re-embed into dimension r, or None.

    The image of a dimension-r vector has a fixed dimension r1; its class
    meets V_r exactly when it is constant on blocks of length r1/g with
    g = gcd(r, r1) (membership in the largest admissible subspace of the
    divisor lattice).
    """
    r1 = w.shape[0]
    g = math.gcd(r, r1)
    blk = r1 // g
    blocks = w.reshape(g, blk)
    z = blocks.mean(axis=1)
    if np.abs(blocks - z[:, None]).max() > tol:
        return None
    return np.repeat(z, r // g)


def projective_stationary_realization(
    A, r: int, tol: float = DEFAULT_TOL
) -> Optional[np.ndarray]:
    """Square matrix reproducing the quotient dynamics on classes met by V_r.

    Tests every standard basis vector of V_r: the image under A must reduce
    into a dimension dividing r.  When all columns pass, returns the r-by-r
    matrix whose i-th column is the reduced-then-embedded image; otherwise
    returns ``None`` (the class of V_r is not invariant).  Works precisely
    where ordinary invariant dimensions may not exist.
    """
    A = as_matrix(A)
    if r < 1:
        raise ValueError("dimension must be positive")
    cols = []
    for i in range(r):
        e = np.zeros(r)
        e[i] = 1.0
        img = _class_invariant_image(A, v_product(A, e), r, tol)
        if img is None:
            return None
        cols.append(img)
    return np.column_stack(cols)


def subspace_class_invariant(A, basis: Sequence, tol: float = DEFAULT_TOL) -> bool:
    """Whether the class of span(basis) inside V_r is invariant under A.

    Each basis image must reduce into V_r (block-constant pattern) and the
    re-embedded image must lie in span(basis) up to a least-squares
    residual of at most tol.
    """
    A = as_matrix(A)
    vecs = [as_vector(b) for b in basis]
    if not vecs:
        raise ValueError("empty basis")
    r = vecs[0].shape[0]
    if any(v.shape[0] != r for v in vecs):
        raise ShapeMismatchError("basis vectors must share one dimension")
    Bmat = np.column_stack(vecs)
    for b in vecs:
        img = _class_invariant_image(A, v_product(A, b), r, tol)
        if img is None:
            return False
        coef, *_ = np.linalg.lstsq(Bmat, img, rcond=None)
        if np.abs(Bmat @ coef - img).max() > tol:
            return False
    return True
