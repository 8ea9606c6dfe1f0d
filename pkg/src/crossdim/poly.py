"""Formal polynomials of matrices.

A formal polynomial is a finite sum ``sum_mu A_mu z_mu`` indexed by positive
rationals, where the coefficient stored at exponent mu is a matrix whose
reduced rows/cols ratio equals mu.  Addition is per-exponent M-addition,
multiplication is convolution over exponents with the semi-tensor product
(``z_a z_b = z_{ab}``), and the action on a vector folds the per-term
V-products together with V-addition.

Genuinely infinite series (matrix exp/sin/cos of a possibly non-square
matrix) are represented as a :class:`TruncatedSeries`: the finite prefix of
a principal formal polynomial plus a certified bound on the discarded tail,
measured in the dimension-free operator norm.  The bound is what makes the
absolute-convergence assumption checkable instead of assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .arith import as_matrix, as_vector
from .errors import ShapeClassMismatchError
from .quotient import DEFAULT_TOL, reduce_mat
from .stp import m_add, m_product, m_sub, op_norm_v, shape_class, v_add, v_product


class FormalPoly:
    """Finite map from reduced positive rational exponent to matrix coefficient.

    Duplicate exponents passed to the constructor are merged by M-addition;
    exactly-zero coefficients are dropped so the representation is normalized.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping, Iterable, None] = None):
        items = []
        if terms is None:
            pass
        elif isinstance(terms, Mapping):
            items = list(terms.items())
        else:
            items = list(terms)
        acc: dict[Fraction, np.ndarray] = {}
        for mu, coeff in items:
            mu = Fraction(mu)
            if mu <= 0:
                raise ValueError("exponents must be positive rationals")
            C = as_matrix(coeff)
            if shape_class(C) != mu:
                raise ShapeClassMismatchError(
                    f"coefficient of shape {C.shape} cannot sit at exponent {mu}"
                )
            acc[mu] = m_add(acc[mu], C) if mu in acc else C.copy()
        self._terms = {mu: C for mu, C in acc.items() if np.any(C)}

    @property
    def terms(self) -> dict[Fraction, np.ndarray]:
        """Exponent -> coefficient map (insertion-independent, keyed exactly)."""
        return dict(self._terms)

    def exponents(self) -> list[Fraction]:
        return sorted(self._terms)

    def coeff(self, mu) -> np.ndarray | None:
        return self._terms.get(Fraction(mu))

    def is_zero(self) -> bool:
        return not self._terms

    def max_abs(self) -> float:
        """Largest absolute coefficient entry (0 for the zero polynomial)."""
        if not self._terms:
            return 0.0
        return max(float(np.abs(C).max()) for C in self._terms.values())

    def norm_sum(self) -> float:
        """Sum of coefficient operator norms (finite for stored polynomials)."""
        return sum(op_norm_v(C) for C in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"z[{mu}]: {C.shape[0]}x{C.shape[1]}" for mu, C in sorted(self._terms.items())
        )
        return f"FormalPoly({{{parts}}})"


def monomial(coeff, mu=None) -> FormalPoly:
    """Single-term polynomial; the exponent defaults to the shape class."""
    C = as_matrix(coeff)
    return FormalPoly([(Fraction(mu) if mu is not None else shape_class(C), C)])


def identity_poly() -> FormalPoly:
    """The multiplicative identity: the scalar 1 at exponent 1."""
    return FormalPoly([(Fraction(1), np.array([[1.0]]))])


def poly_add(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    """Per-exponent M-addition over the union of exponents."""
    out: list[tuple[Fraction, np.ndarray]] = []
    for mu in set(p._terms) | set(q._terms):
        a, b = p._terms.get(mu), q._terms.get(mu)
        if a is None:
            out.append((mu, b))
        elif b is None:
            out.append((mu, a))
        else:
            out.append((mu, m_add(a, b)))
    return FormalPoly(out)


def poly_sub(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    return poly_add(p, poly_scale(-1.0, q))


def poly_scale(c: float, p: FormalPoly) -> FormalPoly:
    return FormalPoly([(mu, float(c) * C) for mu, C in p._terms.items()])


def poly_mul(p: FormalPoly, q: FormalPoly) -> FormalPoly:
    """Convolution product: the coefficient at mu M-sums A_xi |x| B_eta over xi*eta = mu."""
    out: dict[Fraction, np.ndarray] = {}
    for xi in p.exponents():
        for eta in q.exponents():
            mu = xi * eta
            prod = m_product(p._terms[xi], q._terms[eta])
            out[mu] = m_add(out[mu], prod) if mu in out else prod
    return FormalPoly(out)


def lie_bracket(p: FormalPoly, q: FormalPoly, tol: float = DEFAULT_TOL) -> FormalPoly:
    """Commutator ``p |x| q [-] q |x| p`` with class-aware subtraction.

    The two products' coefficients at one exponent may have different
    concrete sizes within the class; both are reduced to canonical
    representatives before the M-subtraction, and the stored coefficients
    are reduced again so brackets compose canonically.
    """
    pq = poly_mul(p, q)
    qp = poly_mul(q, p)
    out: list[tuple[Fraction, np.ndarray]] = []
    for mu in set(pq._terms) | set(qp._terms):
        a, b = pq._terms.get(mu), qp._terms.get(mu)
        if a is None:
            d = -reduce_mat(b, tol).rep
        elif b is None:
            d = reduce_mat(a, tol).rep
        else:
            d = m_sub(reduce_mat(a, tol).rep, reduce_mat(b, tol).rep)
        d = reduce_mat(d, tol).rep
        out.append((mu, d))
    return FormalPoly(out)


def poly_apply(p, x) -> np.ndarray:
    """Action on a vector: V-sum over terms of A_mu |> x.

    Accepts a :class:`FormalPoly` (exact) or a :class:`TruncatedSeries`
    (evaluated at t = 1 with its certified tail bound).
    """
    if isinstance(p, TruncatedSeries):
        return p.apply(x)
    x = as_vector(x)
    acc = None
    for mu in p.exponents():
        term = v_product(p._terms[mu], x)
        acc = term if acc is None else v_add(acc, term)
    if acc is None:
        raise ValueError("cannot apply the zero polynomial (pick a zero dimension)")
    return acc


def poly_allclose(p: FormalPoly, q: FormalPoly, tol: float = DEFAULT_TOL) -> bool:
    """Entrywise comparison of exactly matching exponents and shapes."""
    if set(p._terms) != set(q._terms):
        return False
    for mu, C in p._terms.items():
        D = q._terms[mu]
        if C.shape != D.shape or np.abs(C - D).max() > tol:
            return False
    return True


def poly_to_json(p: FormalPoly) -> list[dict]:
    """Serialize as a list of {mu_num, mu_den, rows, cols, data} records."""
    out = []
    for mu in p.exponents():
        C = p._terms[mu]
        out.append(
            {
                "mu_num": mu.numerator,
                "mu_den": mu.denominator,
                "rows": C.shape[0],
                "cols": C.shape[1],
                "data": [float(v) for v in C.reshape(-1)],
            }
        )
    return out


def poly_from_json(records: Sequence[Mapping]) -> FormalPoly:
    terms = []
    for rec in records:
        mu = Fraction(int(rec["mu_num"]), int(rec["mu_den"]))
        C = np.array(rec["data"], dtype=float).reshape(int(rec["rows"]), int(rec["cols"]))
        terms.append((mu, C))
    return FormalPoly(terms)


# ---------------------------------------------------------------------------
# Truncated principal formal polynomials (analytic generators)
# ---------------------------------------------------------------------------

_GENERATORS = ("exp", "sin", "cos")


def _generator_coeffs(name: str, order: int) -> tuple[float, ...]:
    cs = []
    for i in range(order + 1):
        if name == "exp":
            cs.append(1.0 / math.factorial(i))
        elif name == "sin":
            cs.append(0.0 if i % 2 == 0 else (-1.0) ** ((i - 1) // 2) / math.factorial(i))
        else:  # cos
            cs.append(0.0 if i % 2 == 1 else (-1.0) ** (i // 2) / math.factorial(i))
    return tuple(cs)


def _exp_tail(a: float, order: int) -> float:
    """Upper bound on sum_{i > order} a^i / i!; dominates the sin/cos tails."""
    if a == 0.0:
        return 0.0
    log_term = (order + 1) * math.log(a) - math.lgamma(order + 2)
    if log_term > 700.0:
        return math.inf
    term = math.exp(log_term)
    tail, i = 0.0, order + 1
    while term > 1e-300 and i < order + 100000:
        tail += term
        i += 1
        term *= a / i
    return tail


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Finite prefix of a principal formal polynomial with a tail bound.

    ``powers[i]`` is the i-th semi-tensor power of the base (``powers[0]``
    is the 1x1 identity) and ``coeffs[i]`` the series coefficient, so the
    represented operator is ``sum_i coeffs[i] * powers[i] * z^i`` with the
    discarded tail bounded by ``tail_bound`` in operator norm at t = 1.
    """

    base: np.ndarray
    coeff_rule: str
    order: int
    coeffs: tuple[float, ...]
    powers: tuple[np.ndarray, ...]
    base_norm: float
    tail_bound: float

    def tail_bound_at(self, t: float = 1.0) -> float:
        """Tail bound for the series evaluated with argument scaled by t."""
        return _exp_tail(self.base_norm * abs(t), self.order)

    def norm_sum(self) -> float:
        """Certified bound on the full series' absolute-convergence sum."""
        partial = sum(
            abs(c) * op_norm_v(P) for c, P in zip(self.coeffs, self.powers) if c != 0.0
        )
        return partial + self.tail_bound

    def apply(self, x, t: float = 1.0) -> np.ndarray:
        """V-sum of ``coeffs[i] * t^i * (base^i |> x)`` over the stored orders.

        The truncation error is bounded by ``tail_bound_at(t) * norm_v(x)``
        in the dimension-free norm.
        """
        x = as_vector(x)
        acc = None
        y = x
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                term = (c * t**i) * y
                acc = term if acc is None else v_add(acc, term)
            if i < self.order:
                y = v_product(self.base, y)
        return acc

    def to_formal_poly(self) -> FormalPoly:
        """Materialize the stored prefix as a plain formal polynomial."""
        mu = shape_class(self.base)
        terms = []
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                terms.append((mu**i, c * self.powers[i]))
        return FormalPoly(terms)


def analytic_poly(A, generator: Union[str, Sequence[float]] = "exp", order: int = 30) -> TruncatedSeries:
    """Principal formal polynomial of an analytic generator, truncated.

    ``generator`` is one of ``"exp"``, ``"sin"``, ``"cos"`` or an explicit
    coefficient sequence c_0..c_order (zero tail).  Powers of the base are
    taken under the semi-tensor product, so non-square bases are admitted;
    their powers grow until the dimension guard stops them.  For the named
    generators the absolute-convergence sum is finite for every base, and
    the reported tail bound certifies it.
    """
    A = as_matrix(A)
    if order < 1:
        raise ValueError("truncation order must be >= 1")
    if isinstance(generator, str):
        if generator not in _GENERATORS:
            raise ValueError(f"unknown generator {generator!r}")
        name = generator
        coeffs = _generator_coeffs(generator, order)
        a = op_norm_v(A)
        tail = _exp_tail(a, order)
    else:
        name = "custom"
        coeffs = tuple(float(c) for c in generator)
        if len(coeffs) != order + 1:
            raise ValueError("custom coefficients must have length order + 1")
        a = op_norm_v(A)
        tail = 0.0
    powers = [np.array([[1.0]])]
    for _ in range(order):
        powers.append(m_product(powers[-1], A))
    return TruncatedSeries(
        base=A.copy(),
        coeff_rule=name,
        order=order,
        coeffs=coeffs,
        powers=tuple(powers),
        base_norm=a,
        tail_bound=tail,
    )
