"""Exhaustive goodness oracle for tiny algebras over tiny fields."""

from __future__ import annotations

import itertools
import logging
from typing import Iterator

from euclid_engine.algebra_core import Algebra
from euclid_engine.errors import InstanceTooLargeError
from euclid_engine.exact_linalg import Matrix, PrimeField
from euclid_engine.incidence import admissible
from euclid_engine.subspace import (
    Side,
    Subspace,
    annihilator,
    dual_product,
    from_matrix,
    full_subspace,
    right_product,
    zero_subspace,
)

logger = logging.getLogger(__name__)

MAX_TOY_DIMENSION = 4
MAX_TOY_PRIME = 7


def enumerate_subspaces(field: PrimeField, within: Subspace, dim: int) -> Iterator[Subspace]:
    """Every dim-dimensional subspace of `within`, each exactly once.

    Walks the reduced echelon coefficient matrices: a pivot pattern, then every
    assignment of the entries right of each pivot outside the pivot columns.
    """
    m = within.dim
    if not 0 <= dim <= m:
        return
    if dim == 0:
        yield zero_subspace(field, within.ambient, within.side)
        return
    for pivots in itertools.combinations(range(m), dim):
        slots = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, m) if j not in pivots]
        for values in itertools.product(range(field.p), repeat=len(slots)):
            rows = [[0] * m for _ in range(dim)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), v in zip(slots, values):
                rows[i][j] = v
            coefficients = Matrix.from_rows(field, rows, cols=m)
            yield from_matrix(coefficients @ within.basis, within.side)


def _check_size(algebra: Algebra) -> None:
    if not algebra.field.toy:
        raise InstanceTooLargeError("the exhaustive oracle runs in toy mode only")
    if algebra.n > MAX_TOY_DIMENSION or algebra.field.p > MAX_TOY_PRIME:
        raise InstanceTooLargeError(
            f"instance too large: n={algebra.n}, p={algebra.field.p} (limits n≤{MAX_TOY_DIMENSION}, p≤{MAX_TOY_PRIME})"
        )


def toy_oracle_goodness(algebra: Algebra, U: Subspace, r: int, s: int) -> bool:
    """Whether some (X, Y) over this field has dim U.X = ur and dim Y.U = us with ⟨Y.U, X⟩ = 0."""
    _check_size(algebra)
    n, u = algebra.n, U.dim
    if not admissible(n, r, s, u):
        return False
    if u == 0:
        return True
    field = algebra.field
    whole = full_subspace(field, n, Side.PRIMAL)
    checked = 0
    for Y in enumerate_subspaces(field, whole, s):
        yu = right_product(algebra, Y, U)
        if yu.dim != u * s:
            continue
        for X in enumerate_subspaces(field, annihilator(yu), r):
            checked += 1
            if dual_product(algebra, U, X).dim == u * r:
                logger.debug("toy oracle: witness after %d candidate pairs", checked)
                return True
    logger.debug("toy oracle: no witness among %d candidate pairs", checked)
    return False
