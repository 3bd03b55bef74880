"""Incidence loci G'(r,s,U) and G(r,s,U), their tangent map and good subspaces.

A point is a pair (X ⊂ A*, Y ⊂ A) with ⟨Y.U, X⟩ = 0. It lies in the open
part G(r,s,U) when both products reach their maximal dimensions,
dim U.X = u·r and dim Y.U = u·s.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from numpy.random import Generator

from euclid_engine.algebra_core import Algebra, AlgebraElement
from euclid_engine.errors import DimensionConstraintError, EngineError, RetryBudgetExhausted
from euclid_engine.exact_linalg import Matrix, kernel, rank
from euclid_engine.subspace import (
    Side,
    Subspace,
    annihilator,
    dual_product,
    dual_span,
    from_matrix,
    gl1_translate,
    is_subspace_of,
    pairing_vanishes,
    primal_span,
    random_subspace,
    random_subspace_within,
    right_product,
)

logger = logging.getLogger(__name__)


def admissible(n: int, r: int, s: int, u: int) -> bool:
    """n ≥ r·u + s and n ≥ s·u + r, with 0 ≤ r, s ≤ n."""
    if min(r, s, u) < 0 or r > n or s > n:
        return False
    return n >= r * u + s and n >= s * u + r


def g_dimension(n: int, r: int, s: int, u: int) -> int:
    return r * (n - r) + s * (n - s) - s * r * u


def _require_admissible(n: int, r: int, s: int, u: int) -> None:
    if not admissible(n, r, s, u):
        raise DimensionConstraintError(n, r, s, u)


@dataclass(frozen=True)
class IncidencePoint:
    X: Subspace
    Y: Subspace
    U: Subspace
    ux_dim: int
    yu_dim: int

    @classmethod
    def build(cls, algebra: Algebra, X: Subspace, Y: Subspace, U: Subspace) -> "IncidencePoint":
        if X.side is not Side.DUAL or Y.side is not Side.PRIMAL or U.side is not Side.PRIMAL:
            raise ValueError("an incidence point needs X in A*, Y and U in A")
        return cls(X, Y, U, dual_product(algebra, U, X).dim, right_product(algebra, Y, U).dim)

    @property
    def n(self) -> int:
        return self.Y.ambient

    @property
    def r(self) -> int:
        return self.X.dim

    @property
    def s(self) -> int:
        return self.Y.dim

    @property
    def u(self) -> int:
        return self.U.dim

    def dims(self) -> Tuple[int, int, int]:
        return self.r, self.s, self.u

    def to_json(self) -> Dict[str, Any]:
        return {"X": self.X.to_json(), "Y": self.Y.to_json(), "U": self.U.to_json()}

    @classmethod
    def from_json(cls, algebra: Algebra, payload: Dict[str, Any]) -> "IncidencePoint":
        return cls.build(
            algebra,
            Subspace.from_json(algebra.field, payload["X"]),
            Subspace.from_json(algebra.field, payload["Y"]),
            Subspace.from_json(algebra.field, payload["U"]),
        )


@dataclass(frozen=True)
class GoodnessCertificate:
    """Outcome of a goodness search for one pair (r, s).

    A missing point means "not proven good", never "proven bad".
    """

    r: int
    s: int
    point: Optional[IncidencePoint]
    attempts: int
    stream: Optional[str] = None
    failure: Optional[str] = None

    @property
    def certified(self) -> bool:
        return self.point is not None

    def to_json(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "pair": [self.r, self.s],
            "certified": self.certified,
            "attempts": self.attempts,
            "stream": self.stream,
        }
        if self.point is not None:
            payload["dims"] = {"UX": self.point.ux_dim, "YU": self.point.yu_dim}
            payload["point"] = self.point.to_json()
        if self.failure is not None:
            payload["failure"] = self.failure
        return payload


# -------------------------
# Membership
# -------------------------
def in_G_prime(algebra: Algebra, X: Subspace, Y: Subspace, U: Subspace) -> bool:
    """⟨Y.U, X⟩ = 0, evaluated both directly and as Y ⊆ (U.X)^⊥."""
    direct = pairing_vanishes(right_product(algebra, Y, U), X)
    transposed = is_subspace_of(Y, annihilator(dual_product(algebra, U, X)))
    if direct != transposed:
        raise EngineError(f"pairing readings disagree: ⟨Y.U,X⟩=0 is {direct}, Y ⊆ (U.X)^⊥ is {transposed}")
    return direct


def in_G(algebra: Algebra, X: Subspace, Y: Subspace, U: Subspace) -> bool:
    n, r, s, u = algebra.n, X.dim, Y.dim, U.dim
    _require_admissible(n, r, s, u)
    if not in_G_prime(algebra, X, Y, U):
        return False
    return dual_product(algebra, U, X).dim == u * r and right_product(algebra, Y, U).dim == u * s


def point_in_G(algebra: Algebra, pt: IncidencePoint) -> bool:
    return in_G(algebra, pt.X, pt.Y, pt.U)


def translate_point(algebra: Algebra, a: AlgebraElement, pt: IncidencePoint) -> IncidencePoint:
    """(a·X, a·Y) relative to the same U."""
    return IncidencePoint.build(
        algebra, gl1_translate(algebra, a, pt.X), gl1_translate(algebra, a, pt.Y), pt.U
    )


# -------------------------
# Sampling
# -------------------------
def sample_G_point(
    algebra: Algebra, r: int, s: int, U: Subspace, rng: Generator, budget: int = 64
) -> IncidencePoint:
    """Random Y with dim Y.U = us, then random X ⊆ (Y.U)^⊥ with dim U.X = ur."""
    return sample_G_point_counted(algebra, r, s, U, rng, budget)[0]


def sample_G_point_counted(
    algebra: Algebra, r: int, s: int, U: Subspace, rng: Generator, budget: int = 64
) -> Tuple[IncidencePoint, int]:
    """Like `sample_G_point`, also returning how many (Y, X) draws it took."""
    n, u = algebra.n, U.dim
    _require_admissible(n, r, s, u)
    stage = "Y"
    for attempt in range(1, budget + 1):
        Y = random_subspace(algebra.field, n, Side.PRIMAL, s, rng, budget)
        yu = right_product(algebra, Y, U)
        if yu.dim != u * s:
            stage = "Y"
            logger.debug("sample_G_point: dim Y.U = %d != %d (draw %d)", yu.dim, u * s, attempt)
            continue
        X = random_subspace_within(annihilator(yu), r, rng, budget)
        if dual_product(algebra, U, X).dim != u * r:
            stage = "X"
            logger.debug("sample_G_point: dim U.X short of %d (draw %d)", u * r, attempt)
            continue
        return IncidencePoint(X, Y, U, u * r, u * s), attempt
    raise RetryBudgetExhausted(f"sample_G_point[{stage}]", budget)


# -------------------------
# Projection fibers
# -------------------------
@dataclass(frozen=True)
class FiberSpace:
    """The fiber of a projection of G'(r,s,U): all k-dimensional subspaces of `ambient`."""

    ambient: Subspace
    k: int

    @property
    def dimension(self) -> int:
        return self.k * (self.ambient.dim - self.k)


def first_projection_fiber(algebra: Algebra, X: Subspace, U: Subspace, s: int) -> FiberSpace:
    """Fiber over X: the Y of dimension s inside (U.X)^⊥."""
    return FiberSpace(annihilator(dual_product(algebra, U, X)), s)


def second_projection_fiber(algebra: Algebra, Y: Subspace, U: Subspace, r: int) -> FiberSpace:
    """Fiber over Y: the X of dimension r inside (Y.U)^⊥."""
    return FiberSpace(annihilator(right_product(algebra, Y, U)), r)


def sample_in_fiber(fiber: FiberSpace, rng: Generator, budget: int = 64) -> Subspace:
    return random_subspace_within(fiber.ambient, fiber.k, rng, budget)


# -------------------------
# Tangent map
# -------------------------
def theta_matrix(algebra: Algebra, pt: IncidencePoint) -> Matrix:
    """Θ: Hom(X, A*/X) ⊕ Hom(Y, A/Y) → (X⊗Y⊗U)*.

    Rows are the triples (x_i, y_j, u_k) in lexicographic order. Columns are
    the f-block (i', a) followed by the g-block (j', b), where a and b run over
    the free coordinates of X and Y, whose unit vectors span complements.
    """
    n = algebra.n
    xs, ys, us = pt.X.vectors(), pt.Y.vectors(), pt.U.vectors()
    x_free, y_free = pt.X.free_columns(), pt.Y.free_columns()
    r, s = len(xs), len(ys)
    cols = r * len(x_free) + s * len(y_free)

    products = {(j, k): algebra.mul(ys[j], us[k]) for j in range(s) for k in range(len(us))}
    functionals = {}
    for k, uk in enumerate(us):
        right = algebra.right_mul_matrix(uk)
        for i, xi in enumerate(xs):
            functionals[(i, k)] = right.transpose().apply(xi)

    rows: List[List[int]] = []
    for i in range(r):
        for j in range(s):
            for k in range(len(us)):
                row = [0] * cols
                yu = products[(j, k)]
                for a_index, a in enumerate(x_free):
                    row[i * len(x_free) + a_index] = yu[a]
                offset = r * len(x_free)
                xu = functionals[(i, k)]
                for b_index, b in enumerate(y_free):
                    row[offset + j * len(y_free) + b_index] = xu[b]
                rows.append(row)
    assert cols == r * (n - r) + s * (n - s)
    return Matrix.from_rows(algebra.field, rows, cols=cols)


def tangent_theta_rank(algebra: Algebra, pt: IncidencePoint) -> int:
    return rank(theta_matrix(algebra, pt))


def tangent_dimension(algebra: Algebra, pt: IncidencePoint) -> int:
    n, r, s = algebra.n, pt.r, pt.s
    return r * (n - r) + s * (n - s) - tangent_theta_rank(algebra, pt)


# -------------------------
# Good subspaces
# -------------------------
def good_witness_etale(algebra: Algebra, r: int, s: int, u: int) -> Tuple[Subspace, Subspace, Subspace]:
    """Explicit (U, X, Y) in G(r,s,U) for a monogenic algebra with generator t.

    For s ≥ r: X = ⟨1,…,t^{n-r-1}⟩^⊥, Y = ⟨1,…,t^{s-1}⟩, U = ⟨1,t^s,…,t^{(u-1)s}⟩.
    For r > s the roles swap through the trace-like form λ (coefficient of
    t^{n-1}): X = ⟨t^i·λ : i < r⟩, Y = ⟨t^k·λ : k < n-s⟩^⊥, U = ⟨1,t^r,…⟩.
    """
    n = algebra.n
    _require_admissible(n, r, s, u)
    t = algebra.generator()
    powers = [algebra.power(t, k) for k in range(n)]

    if s >= r:
        X = annihilator(primal_span(algebra, powers[: n - r]))
        Y = primal_span(algebra, powers[:s])
        U = primal_span(algebra, [powers[k * s] for k in range(u)])
    else:
        form = tuple(1 if k == n - 1 else 0 for k in range(n))
        shifted = [algebra.dual_module_action_matrix(powers[k]).apply(form) for k in range(n)]
        X = dual_span(algebra, shifted[:r])
        Y = annihilator(dual_span(algebra, shifted[: n - s]))
        U = primal_span(algebra, [powers[k * r] for k in range(u)])

    if not in_G(algebra, X, Y, U):
        raise EngineError(f"witness for (n,r,s,u)=({n},{r},{s},{u}) fails the incidence conditions")
    return U, X, Y


def is_good(
    algebra: Algebra,
    U: Subspace,
    pairs: Sequence[Tuple[int, int]],
    rng: Generator,
    budget: int = 64,
    stream: Optional[str] = None,
) -> List[GoodnessCertificate]:
    """One certificate per pair; `stream` labels the random stream the search drew from."""
    certificates: List[GoodnessCertificate] = []
    for r, s in pairs:
        _require_admissible(algebra.n, r, s, U.dim)
        try:
            point, attempts = sample_G_point_counted(algebra, r, s, U, rng, budget)
        except RetryBudgetExhausted as exc:
            logger.debug("is_good: (%d,%d) not certified: %s", r, s, exc)
            certificates.append(GoodnessCertificate(r, s, None, budget, stream, str(exc)))
            continue
        certificates.append(GoodnessCertificate(r, s, point, attempts, stream))
    return certificates


# -------------------------
# Stabilizers
# -------------------------
def point_stabilizer(algebra: Algebra, pt: IncidencePoint) -> Subspace:
    """{a ∈ A : a·Y ⊆ Y and L_aᵀ X ⊆ X}."""
    n = algebra.n
    blocks: List[Matrix] = []
    y_perp = annihilator(pt.Y).basis
    for y in pt.Y.vectors():
        blocks.append(y_perp @ algebra.right_mul_matrix(y))
    x_perp = annihilator(pt.X).basis
    basis_right = [algebra.right_mul_matrix(algebra.basis_vector(j)) for j in range(n)]
    for phi in pt.X.vectors():
        # row j of `moved` is a ↦ φ(a·e_j)
        moved = Matrix.from_rows(
            algebra.field, [basis_right[j].transpose().apply(phi) for j in range(n)], cols=n
        )
        blocks.append(x_perp @ moved)
    if not blocks:
        return from_matrix(Matrix.identity(algebra.field, n), Side.PRIMAL)
    return from_matrix(kernel(blocks[0].vstack(*blocks[1:])), Side.PRIMAL)
