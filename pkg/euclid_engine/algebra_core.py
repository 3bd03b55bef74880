"""Finite-dimensional associative algebras over F_p.

An algebra is stored through its structure constants c[i][j][k], with
e_i·e_j = Σ_k c[i][j][k] e_k. Elements are coordinate tuples in that basis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator
from sympy import Poly, symbols

from euclid_engine.errors import AlgebraValidationError, NotInvertibleError, RetryBudgetExhausted
from euclid_engine.exact_linalg import Matrix, PrimeField, Vector, solve

logger = logging.getLogger(__name__)

AlgebraElement = Tuple[int, ...]

_T = symbols("t")
_ACTION_CACHE_LIMIT = 4096


@dataclass(frozen=True)
class MonogenicTag:
    """A = F_p[t]/(f) with basis 1, t, ..., t^{n-1}.

    `poly` lists c_0..c_{n-1} of f = t^n + c_{n-1} t^{n-1} + ... + c_0.
    """

    poly: Tuple[int, ...]

    @property
    def generator_index(self) -> int:
        return 1 if len(self.poly) > 1 else 0


class Algebra:
    """An associative unital algebra of dimension n, validated at construction."""

    def __init__(
        self,
        field: PrimeField,
        structure: np.ndarray,
        unit: Sequence[int],
        monogenic: Optional[MonogenicTag] = None,
    ) -> None:
        n = structure.shape[0]
        if structure.shape != (n, n, n):
            raise AlgebraValidationError(f"structure constants must have shape n×n×n, got {structure.shape}")
        if len(unit) != n:
            raise AlgebraValidationError(f"unit has length {len(unit)}, expected {n}")
        structure.setflags(write=False)
        self.field = field
        self.n = n
        self._structure = structure
        self.unit: AlgebraElement = tuple(int(x) % field.p for x in unit)
        self.monogenic = monogenic
        self._left_cache: Dict[AlgebraElement, Matrix] = {}
        self._right_cache: Dict[AlgebraElement, Matrix] = {}
        self._validate()

    # -------------------------
    # Validation
    # -------------------------
    def _validate(self) -> None:
        identity = Matrix.identity(self.field, self.n)
        if self.left_mul_matrix(self.unit) != identity:
            column = _first_differing_column(self.left_mul_matrix(self.unit), identity)
            raise AlgebraValidationError("bad unit", ("unit", "·", f"e{column}"))
        if self.right_mul_matrix(self.unit) != identity:
            column = _first_differing_column(self.right_mul_matrix(self.unit), identity)
            raise AlgebraValidationError("bad unit", (f"e{column}", "·", "unit"))
        for i in range(self.n):
            left_i = self.left_mul_matrix(self.basis_vector(i))
            for j in range(self.n):
                product = self.mul(self.basis_vector(i), self.basis_vector(j))
                lhs = self.left_mul_matrix(product)
                rhs = left_i @ self.left_mul_matrix(self.basis_vector(j))
                if lhs != rhs:
                    raise AlgebraValidationError("not associative", (i, j, _first_differing_column(lhs, rhs)))

    # -------------------------
    # Elements
    # -------------------------
    def basis_vector(self, i: int) -> AlgebraElement:
        return tuple(1 if k == i else 0 for k in range(self.n))

    def mul(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        return self.left_mul_matrix(a).apply(b)

    def power(self, a: AlgebraElement, k: int) -> AlgebraElement:
        result = self.unit
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def generator(self) -> AlgebraElement:
        """The generator t of a monogenic algebra."""
        if self.monogenic is None:
            raise ValueError("algebra has no monogenic presentation")
        return self.basis_vector(self.monogenic.generator_index)

    # -------------------------
    # Action matrices
    # -------------------------
    def left_mul_matrix(self, a: AlgebraElement) -> Matrix:
        """Column j holds the coordinates of a·e_j."""
        a = tuple(int(x) for x in a)
        cached = self._left_cache.get(a)
        if cached is not None:
            return cached
        vec = np.array([int(x) for x in a], dtype=object)
        table = np.tensordot(vec, self._structure, axes=([0], [0]))
        return _remember(self._left_cache, a, Matrix(self.field, np.array(table.T % self.field.p, dtype=object)))

    def right_mul_matrix(self, a: AlgebraElement) -> Matrix:
        """Column j holds the coordinates of e_j·a."""
        a = tuple(int(x) for x in a)
        cached = self._right_cache.get(a)
        if cached is not None:
            return cached
        vec = np.array([int(x) for x in a], dtype=object)
        table = np.tensordot(self._structure, vec, axes=([1], [0]))
        return _remember(self._right_cache, a, Matrix(self.field, np.array(table.T % self.field.p, dtype=object)))

    def dual_module_action_matrix(self, a: AlgebraElement) -> Matrix:
        """Matrix of φ ↦ (z ↦ φ(z·a)) on A* in the dual basis."""
        return self.right_mul_matrix(a).transpose()

    def gl1_dual_action_matrix(self, a: AlgebraElement) -> Matrix:
        """Matrix of φ ↦ (z ↦ φ(a⁻¹·z)) on A*."""
        inverse = self.invert(a)
        if inverse is None:
            raise NotInvertibleError(f"not invertible: {list(a)}")
        return self.left_mul_matrix(inverse).transpose()

    def invert(self, a: AlgebraElement) -> Optional[AlgebraElement]:
        candidate = solve(self.left_mul_matrix(a), self.unit)
        if candidate is None:
            return None
        if self.mul(a, candidate) != self.unit or self.mul(candidate, a) != self.unit:
            return None
        return candidate

    # -------------------------
    # Sampling
    # -------------------------
    def random_element(self, rng: Generator) -> AlgebraElement:
        return self.field.random_vector(rng, self.n)

    def random_invertible(self, rng: Generator, budget: int = 64) -> AlgebraElement:
        for attempt in range(1, budget + 1):
            a = self.random_element(rng)
            if self.invert(a) is not None:
                if attempt > 1:
                    logger.debug("random_invertible succeeded after %d draws", attempt)
                return a
        raise RetryBudgetExhausted("random_invertible", budget)

    # -------------------------
    # Encoding
    # -------------------------
    def structure_constants(self) -> List[List[List[int]]]:
        return [[[int(x) for x in self._structure[i, j, :]] for j in range(self.n)] for i in range(self.n)]

    def to_json(self) -> Dict[str, Any]:
        if self.monogenic is not None:
            return {"prime": str(self.field.p), "kind": "monogenic", "poly": [str(c) for c in self.monogenic.poly]}
        return {
            "prime": str(self.field.p),
            "kind": "table",
            "unit": [str(x) for x in self.unit],
            "structure": [[[str(x) for x in row] for row in block] for block in self.structure_constants()],
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any], toy: bool = False) -> "Algebra":
        field = PrimeField(int(payload["prime"]), toy=toy)
        kind = payload.get("kind")
        if kind == "monogenic":
            return etale_from_poly([int(c) for c in payload["poly"]], field)
        if kind == "table":
            structure = [[[int(x) for x in row] for row in block] for block in payload["structure"]]
            return from_structure_constants(field, structure, [int(x) for x in payload["unit"]])
        raise AlgebraValidationError(f"unknown algebra kind {kind!r}")

    def __repr__(self) -> str:
        kind = "monogenic" if self.monogenic is not None else "table"
        return f"Algebra(n={self.n}, p={self.field.p}, {kind})"


def _remember(cache: Dict[AlgebraElement, Matrix], key: AlgebraElement, matrix: Matrix) -> Matrix:
    if len(cache) >= _ACTION_CACHE_LIMIT:
        cache.clear()
    cache[key] = matrix
    return matrix


def _first_differing_column(left: Matrix, right: Matrix) -> int:
    for j in range(left.cols):
        if left.column(j) != right.column(j):
            return j
    return -1


def from_structure_constants(field: PrimeField, c: Sequence[Sequence[Sequence[int]]], unit: Sequence[int]) -> Algebra:
    n = len(c)
    structure = np.empty((n, n, n), dtype=object)
    for i in range(n):
        if len(c[i]) != n:
            raise AlgebraValidationError(f"structure constants must have shape n×n×n (row {i})")
        for j in range(n):
            if len(c[i][j]) != n:
                raise AlgebraValidationError(f"structure constants must have shape n×n×n (entry {i},{j})")
            structure[i, j, :] = [int(x) % field.p for x in c[i][j]]
    return Algebra(field, structure, unit)


def _poly_expr(coeffs: Sequence[int], field: PrimeField) -> Poly:
    dense = [1] + [int(c) % field.p for c in reversed(coeffs)]
    return Poly(dense, _T, modulus=field.p)


def is_separable(coeffs: Sequence[int], field: PrimeField) -> bool:
    f = _poly_expr(coeffs, field)
    return f.gcd(f.diff(_T)).degree() == 0


def etale_from_poly(coeffs: Sequence[int], field: PrimeField) -> Algebra:
    """A = F_p[t]/(f) for f = t^n + c_{n-1} t^{n-1} + ... + c_0, with coeffs = [c_0, ..., c_{n-1}]."""
    n = len(coeffs)
    if n < 1:
        raise AlgebraValidationError("defining polynomial must have degree at least 1")
    poly = tuple(int(c) % field.p for c in coeffs)
    f = _poly_expr(poly, field)
    g = f.gcd(f.diff(_T))
    if g.degree() != 0:
        raise AlgebraValidationError("not separable", [int(x) % field.p for x in g.all_coeffs()])

    powers: List[List[int]] = []
    current = [1] + [0] * (n - 1)
    for _ in range(2 * n - 1):
        powers.append(current)
        top = current[-1]
        shifted = [0] + current[:-1]
        current = [(x - top * c) % field.p for x, c in zip(shifted, poly)]

    structure = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            structure[i, j, :] = powers[i + j]
    return Algebra(field, structure, powers[0], monogenic=MonogenicTag(poly))


def random_etale(n: int, field: PrimeField, rng: Generator, budget: int = 64) -> Algebra:
    """A = F_p[t]/(f) for a monic f of degree n with uniformly random lower coefficients."""
    for attempt in range(1, budget + 1):
        coeffs = field.random_vector(rng, n)
        if is_separable(coeffs, field):
            if attempt > 1:
                logger.debug("random_etale: separable polynomial after %d draws", attempt)
            return etale_from_poly(coeffs, field)
    raise RetryBudgetExhausted("random_etale", budget)


def split_algebra(n: int, field: PrimeField) -> Algebra:
    """The product of n copies of F_p, basis of orthogonal idempotents."""
    c = [[[1 if (i == j == k) else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    return from_structure_constants(field, c, [1] * n)


def matrix_algebra(k: int, field: PrimeField) -> Algebra:
    """M_k(F_p) on the matrix units E_ij, stored at index i·k + j."""
    n = k * k
    c = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i in range(k):
        for j in range(k):
            for m in range(k):
                c[i * k + j][j * k + m][i * k + m] = 1
    unit = [1 if i == j else 0 for i in range(k) for j in range(k)]
    return from_structure_constants(field, c, unit)


def is_commutative_at(algebra: Algebra, samples: Sequence[Vector]) -> bool:
    return all(algebra.left_mul_matrix(a) == algebra.right_mul_matrix(a) for a in samples)
