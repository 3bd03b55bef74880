"""Exact arithmetic in F_p and dense matrices with canonical echelon forms.

Entries are stored in numpy object arrays of Python ints, so every product is
computed at full width before it is reduced mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator
from sympy import isprime

from euclid_engine.errors import ZeroInverseError

DEFAULT_PRIME = 2**61 - 1
MIN_PRIME = 2**31 - 1
MAX_PRIME_BOUND = 2**64

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p.

    Moduli below `MIN_PRIME` are only accepted with `toy=True`; they exist for the
    exhaustive oracles, where every genericity argument breaks down anyway.
    """

    p: int = DEFAULT_PRIME
    toy: bool = False

    def __post_init__(self) -> None:
        if self.p >= MAX_PRIME_BOUND:
            raise ValueError(f"modulus {self.p} does not fit a 64-bit machine word")
        if self.p < 2 or not isprime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p < MIN_PRIME and not self.toy:
            raise ValueError(f"modulus {self.p} is below {MIN_PRIME}; small primes need toy mode")

    def reduce(self, a: Any) -> int:
        return int(a) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInverseError()
        return pow(a, -1, self.p)

    def _sample_dtype(self) -> type:
        # int64 cannot hold moduli of 2^63 and above
        return np.int64 if self.p < 2**63 else np.uint64

    def random_vector(self, rng: Generator, length: int) -> Vector:
        if length == 0:
            return ()
        return tuple(int(x) for x in rng.integers(0, self.p, size=length, dtype=self._sample_dtype()).tolist())

    def random_matrix(self, rng: Generator, rows: int, cols: int) -> "Matrix":
        return Matrix.from_rows(self, [self.random_vector(rng, cols) for _ in range(rows)], cols=cols)


class Matrix:
    """Immutable dense matrix over a prime field."""

    __slots__ = ("field", "_data")

    def __init__(self, field: PrimeField, data: np.ndarray) -> None:
        if data.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        data.setflags(write=False)
        self.field = field
        self._data = data

    # -------------------------
    # Construction
    # -------------------------
    @classmethod
    def from_rows(cls, field: PrimeField, rows: Iterable[Sequence[Any]], cols: Optional[int] = None) -> "Matrix":
        reduced = [[int(x) % field.p for x in row] for row in rows]
        if not reduced:
            if cols is None:
                raise ValueError("column count required for a matrix without rows")
            return cls(field, np.empty((0, cols), dtype=object))
        width = len(reduced[0])
        if cols is not None and width != cols:
            raise ValueError(f"expected {cols} columns, got {width}")
        if any(len(row) != width for row in reduced):
            raise ValueError("ragged rows")
        data = np.empty((len(reduced), width), dtype=object)
        for i, row in enumerate(reduced):
            data[i, :] = row
        return cls(field, data)

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "Matrix":
        data = np.empty((rows, cols), dtype=object)
        data.fill(0)
        return cls(field, data)

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "Matrix":
        data = np.empty((n, n), dtype=object)
        data.fill(0)
        for i in range(n):
            data[i, i] = 1
        return cls(field, data)

    # -------------------------
    # Accessors
    # -------------------------
    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def entry(self, i: int, j: int) -> int:
        return int(self._data[i, j])

    def row(self, i: int) -> Vector:
        return tuple(int(x) for x in self._data[i, :])

    def column(self, j: int) -> Vector:
        return tuple(int(x) for x in self._data[:, j])

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def array(self) -> np.ndarray:
        """Writable copy of the underlying object array."""
        return np.array(self._data, dtype=object, copy=True)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._data.flat)

    # -------------------------
    # Arithmetic
    # -------------------------
    def transpose(self) -> "Matrix":
        return Matrix(self.field, np.array(self._data.T, dtype=object, copy=True))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return Matrix.zeros(self.field, self.rows, other.cols)
        product = self._data.dot(other._data) % self.field.p
        return Matrix(self.field, np.array(product, dtype=object))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix(self.field, (self._data + other._data) % self.field.p)

    def apply(self, vector: Sequence[int]) -> Vector:
        """Return m·v for a column vector v."""
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} for {self.cols} columns")
        if self.cols == 0:
            return tuple(0 for _ in range(self.rows))
        v = np.array([int(x) for x in vector], dtype=object)
        return tuple(int(x) % self.field.p for x in self._data.dot(v))

    def vstack(self, *others: "Matrix") -> "Matrix":
        blocks = [self, *others]
        if any(b.cols != self.cols for b in blocks):
            raise ValueError("vstack needs equal column counts")
        return Matrix(self.field, np.vstack([b._data for b in blocks]).astype(object))

    def hstack(self, *others: "Matrix") -> "Matrix":
        blocks = [self, *others]
        if any(b.rows != self.rows for b in blocks):
            raise ValueError("hstack needs equal row counts")
        return Matrix(self.field, np.hstack([b._data for b in blocks]).astype(object))

    def take_rows(self, count: int) -> "Matrix":
        return Matrix(self.field, np.array(self._data[:count, :], dtype=object, copy=True))

    # -------------------------
    # Identity and encoding
    # -------------------------
    def key(self) -> Tuple[int, int, int, Tuple[int, ...]]:
        return (self.field.p, self.rows, self.cols, tuple(int(x) for x in self._data.flat))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, p={self.field.p}, {self.to_rows()})"

    def to_json(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[str(x) for x in row] for row in self.to_rows()],
        }

    @classmethod
    def from_json(cls, field: PrimeField, payload: Dict[str, Any]) -> "Matrix":
        rows = [[int(x) for x in row] for row in payload.get("entries", [])]
        matrix = cls.from_rows(field, rows, cols=int(payload["cols"]))
        if matrix.rows != int(payload["rows"]):
            raise ValueError(f"declared {payload['rows']} rows, found {matrix.rows}")
        return matrix


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row echelon form; zero rows sit at the bottom."""

    matrix: Matrix
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def basis(self) -> Matrix:
        """The nonzero rows, a canonical basis of the row space."""
        return self.matrix.take_rows(self.rank)


def rref(m: Matrix) -> EchelonForm:
    field = m.field
    p = field.p
    a = m.array()
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot_row = next((i for i in range(r, rows) if a[i, c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            a[[r, pivot_row]] = a[[pivot_row, r]]
        a[r, :] = (a[r, :] * field.inv(int(a[r, c]))) % p
        col = a[:, c].copy()
        col[r] = 0
        targets = np.flatnonzero(col != 0)
        if targets.size:
            a[targets, :] = (a[targets, :] - np.outer(col[targets], a[r, :])) % p
        pivots.append(c)
        r += 1
    return EchelonForm(Matrix(field, a), tuple(pivots))


def rank(m: Matrix) -> int:
    return rref(m).rank


def kernel(m: Matrix) -> Matrix:
    """Basis of {v : m·vᵀ = 0}, as the rows of a matrix in echelon form."""
    field = m.field
    echelon = rref(m)
    reduced = echelon.matrix
    pivot_set = set(echelon.pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    vectors: List[List[int]] = []
    for f in free:
        v = [0] * m.cols
        v[f] = 1
        for i, pc in enumerate(echelon.pivots):
            v[pc] = field.neg(reduced.entry(i, f))
        vectors.append(v)
    if not vectors:
        return Matrix.zeros(field, 0, m.cols)
    return rref(Matrix.from_rows(field, vectors, cols=m.cols)).basis()


def solve(m: Matrix, rhs: Sequence[int]) -> Optional[Vector]:
    """Some x with m·x = rhs, or None when the system is inconsistent."""
    if len(rhs) != m.rows:
        raise ValueError(f"rhs of length {len(rhs)} for {m.rows} rows")
    field = m.field
    column = Matrix.from_rows(field, [[x] for x in rhs], cols=1) if m.rows else Matrix.zeros(field, 0, 1)
    echelon = rref(m.hstack(column))
    if m.cols in echelon.pivots:
        return None
    x = [0] * m.cols
    for i, pc in enumerate(echelon.pivots):
        x[pc] = echelon.matrix.entry(i, m.cols)
    return tuple(x)
