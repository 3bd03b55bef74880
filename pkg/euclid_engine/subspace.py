"""Subspaces of A and of its dual A*.

A subspace is stored through the canonical echelon basis of its rows, so two
subspaces are equal exactly when their stored bases are equal. The pairing
between A and A* is the coordinate pairing in the chosen basis of A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Sequence, Tuple

from numpy.random import Generator

from euclid_engine.algebra_core import Algebra, AlgebraElement
from euclid_engine.errors import RetryBudgetExhausted, SideMismatchError
from euclid_engine.exact_linalg import Matrix, PrimeField, Vector, kernel, rank, rref

logger = logging.getLogger(__name__)


class Side(str, Enum):
    PRIMAL = "primal"
    DUAL = "dual"

    def opposite(self) -> "Side":
        return Side.DUAL if self is Side.PRIMAL else Side.PRIMAL


@dataclass(frozen=True)
class Subspace:
    field: PrimeField
    ambient: int
    side: Side
    basis: Matrix
    pivots: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> List[Vector]:
        return [self.basis.row(i) for i in range(self.dim)]

    def free_columns(self) -> Tuple[int, ...]:
        """Coordinates outside the pivots; their unit vectors span a complement."""
        pivot_set = set(self.pivots)
        return tuple(j for j in range(self.ambient) if j not in pivot_set)

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def to_json(self) -> Dict[str, Any]:
        return {
            "side": self.side.value,
            "ambient": self.ambient,
            "basis": [[str(x) for x in row] for row in self.basis.to_rows()],
        }

    @classmethod
    def from_json(cls, field: PrimeField, payload: Dict[str, Any]) -> "Subspace":
        side = Side(payload["side"])
        ambient = int(payload["ambient"])
        rows = [[int(x) for x in row] for row in payload.get("basis", [])]
        if any(len(row) != ambient for row in rows):
            raise ValueError(f"basis rows must have length {ambient}")
        return span(field, ambient, side, rows)

    def __repr__(self) -> str:
        return f"Subspace({self.side.value}, dim {self.dim} in {self.ambient}, {self.basis.to_rows()})"


# -------------------------
# Construction
# -------------------------
def span(field: PrimeField, ambient: int, side: Side, vectors: Iterable[Sequence[int]]) -> Subspace:
    rows = list(vectors)
    if not rows:
        return zero_subspace(field, ambient, side)
    echelon = rref(Matrix.from_rows(field, rows, cols=ambient))
    return Subspace(field, ambient, side, echelon.basis(), echelon.pivots)


def from_matrix(m: Matrix, side: Side) -> Subspace:
    echelon = rref(m)
    return Subspace(m.field, m.cols, side, echelon.basis(), echelon.pivots)


def zero_subspace(field: PrimeField, ambient: int, side: Side) -> Subspace:
    return Subspace(field, ambient, side, Matrix.zeros(field, 0, ambient), ())


def full_subspace(field: PrimeField, ambient: int, side: Side) -> Subspace:
    return Subspace(field, ambient, side, Matrix.identity(field, ambient), tuple(range(ambient)))


def unit_line(algebra: Algebra) -> Subspace:
    return span(algebra.field, algebra.n, Side.PRIMAL, [algebra.unit])


def primal_span(algebra: Algebra, elements: Iterable[AlgebraElement]) -> Subspace:
    return span(algebra.field, algebra.n, Side.PRIMAL, elements)


def dual_span(algebra: Algebra, functionals: Iterable[Sequence[int]]) -> Subspace:
    return span(algebra.field, algebra.n, Side.DUAL, functionals)


# -------------------------
# Lattice operations
# -------------------------
def _check_compatible(s: Subspace, t: Subspace) -> None:
    if s.side is not t.side:
        raise SideMismatchError(s.side.value, t.side.value)
    if s.ambient != t.ambient:
        raise ValueError(f"ambient mismatch: {s.ambient} vs {t.ambient}")


def sum_subspaces(s: Subspace, t: Subspace) -> Subspace:
    _check_compatible(s, t)
    return from_matrix(s.basis.vstack(t.basis), s.side)


def annihilator(s: Subspace) -> Subspace:
    """E^⊥ on the opposite side; dim = n - dim E."""
    return from_matrix(kernel(s.basis), s.side.opposite())


def intersect(s: Subspace, t: Subspace) -> Subspace:
    """S ∩ T = (S^⊥ + T^⊥)^⊥."""
    _check_compatible(s, t)
    return annihilator(sum_subspaces(annihilator(s), annihilator(t)))


def contains(s: Subspace, vector: Sequence[int]) -> bool:
    if len(vector) != s.ambient:
        raise ValueError(f"vector of length {len(vector)} in ambient {s.ambient}")
    stacked = s.basis.vstack(Matrix.from_rows(s.field, [vector], cols=s.ambient))
    return rank(stacked) == s.dim


def is_subspace_of(s: Subspace, t: Subspace) -> bool:
    _check_compatible(s, t)
    if s.dim > t.dim:
        return False
    return rank(t.basis.vstack(s.basis)) == t.dim


def pairing_vanishes(primal: Subspace, dual: Subspace) -> bool:
    """⟨primal, dual⟩ = 0 under the coordinate pairing."""
    if primal.side is not Side.PRIMAL or dual.side is not Side.DUAL:
        raise SideMismatchError(primal.side.value, dual.side.value)
    return (primal.basis @ dual.basis.transpose()).is_zero()


# -------------------------
# Products and translations
# -------------------------
def image(s: Subspace, m: Matrix) -> Subspace:
    """The span of {m·v : v ∈ S}, same side as S."""
    if s.is_zero():
        return zero_subspace(s.field, m.rows, s.side)
    return from_matrix(s.basis @ m.transpose(), s.side)


def module_product(u: Subspace, w: Subspace, action: Callable[[AlgebraElement], Matrix]) -> Subspace:
    """span{action(u_i)·w_j} over the basis vectors of U and W."""
    if u.side is not Side.PRIMAL:
        raise SideMismatchError(u.side.value, Side.PRIMAL.value)
    if u.is_zero() or w.is_zero():
        return zero_subspace(w.field, w.ambient, w.side)
    blocks = [w.basis @ action(vec).transpose() for vec in u.vectors()]
    return from_matrix(blocks[0].vstack(*blocks[1:]), w.side)


def right_product(algebra: Algebra, y: Subspace, u: Subspace) -> Subspace:
    """Y.U = span{y·u} inside A."""
    if y.side is not Side.PRIMAL:
        raise SideMismatchError(y.side.value, Side.PRIMAL.value)
    return module_product(u, y, algebra.right_mul_matrix)


def dual_product(algebra: Algebra, u: Subspace, x: Subspace) -> Subspace:
    """U.X = span{u·φ} inside A*, with (u·φ)(z) = φ(z·u)."""
    if x.side is not Side.DUAL:
        raise SideMismatchError(x.side.value, Side.DUAL.value)
    return module_product(u, x, algebra.dual_module_action_matrix)


def gl1_translate(algebra: Algebra, a: AlgebraElement, s: Subspace) -> Subspace:
    """a·S: left multiplication on A, φ ↦ (z ↦ φ(a⁻¹·z)) on A*."""
    if s.side is Side.PRIMAL:
        if algebra.invert(a) is None:
            # raise the same error the dual branch would
            algebra.gl1_dual_action_matrix(a)
        return image(s, algebra.left_mul_matrix(a))
    return image(s, algebra.gl1_dual_action_matrix(a))


# -------------------------
# Sampling
# -------------------------
def random_subspace(
    field: PrimeField, ambient: int, side: Side, dim: int, rng: Generator, budget: int = 64
) -> Subspace:
    if not 0 <= dim <= ambient:
        raise ValueError(f"dimension {dim} outside [0, {ambient}]")
    if dim == 0:
        return zero_subspace(field, ambient, side)
    for attempt in range(1, budget + 1):
        candidate = from_matrix(field.random_matrix(rng, dim, ambient), side)
        if candidate.dim == dim:
            return candidate
        logger.debug("random_subspace: rank-deficient draw %d of dim %d", attempt, dim)
    raise RetryBudgetExhausted("random_subspace", budget)


def random_subspace_within(w: Subspace, dim: int, rng: Generator, budget: int = 64) -> Subspace:
    """A random dim-dimensional subspace of W."""
    if not 0 <= dim <= w.dim:
        raise ValueError(f"dimension {dim} outside [0, {w.dim}]")
    if dim == 0:
        return zero_subspace(w.field, w.ambient, w.side)
    for attempt in range(1, budget + 1):
        coefficients = w.field.random_matrix(rng, dim, w.dim)
        candidate = from_matrix(coefficients @ w.basis, w.side)
        if candidate.dim == dim:
            return candidate
        logger.debug("random_subspace_within: rank-deficient draw %d", attempt)
    raise RetryBudgetExhausted("random_subspace_within", budget)


def random_extension(inner: Subspace, outer: Subspace, dim: int, rng: Generator, budget: int = 64) -> Subspace:
    """A random subspace of dimension `dim` between `inner` and `outer`."""
    if not is_subspace_of(inner, outer):
        raise ValueError("inner subspace is not contained in outer subspace")
    extra = dim - inner.dim
    for attempt in range(1, budget + 1):
        addition = random_subspace_within(outer, extra, rng, budget)
        candidate = sum_subspaces(inner, addition)
        if candidate.dim == dim:
            return candidate
        logger.debug("random_extension: degenerate draw %d", attempt)
    raise RetryBudgetExhausted("random_extension", budget)


# -------------------------
# Stabilizers
# -------------------------
def stabilizer_subalgebra(algebra: Algebra, e: Subspace) -> Subspace:
    """{a ∈ A : a·E ⊆ E}, the kernel of a ↦ (a·e_i mod E)_i."""
    if e.side is not Side.PRIMAL:
        raise SideMismatchError(e.side.value, Side.PRIMAL.value)
    complement = annihilator(e).basis
    blocks = [complement @ algebra.right_mul_matrix(vec) for vec in e.vectors()]
    if not blocks:
        return full_subspace(algebra.field, algebra.n, Side.PRIMAL)
    return from_matrix(kernel(blocks[0].vstack(*blocks[1:])), Side.PRIMAL)
