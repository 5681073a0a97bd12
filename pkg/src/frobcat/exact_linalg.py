"""Exact dense linear algebra over the rationals and prime fields.

Rational entries are ``fractions.Fraction`` values; prime-field entries are
canonical integer residues in ``[0, p)``.  Matrices wrap numpy arrays purely
as exact containers: residues live in int64 arrays (reduced mod p after
every operation), rationals in object arrays.  No floating point anywhere.

All operations are pure and all values are immutable by convention, so they
can be shared freely across concurrent tasks.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError

RATIONAL = "rational"
PRIME = "prime"

# int64 dot products of residues stay exact while cols * (p-1)^2 < 2^63.
_INT64_LIMIT = 1 << 20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """An exact computation field: the rationals or F_p for a prime p."""

    def __init__(self, kind: str, characteristic: Optional[int] = None):
        if kind == RATIONAL:
            if characteristic not in (None, 0):
                raise InputError("rational field carries no characteristic")
            self.characteristic: Optional[int] = None
        elif kind == PRIME:
            if characteristic is None or not _is_prime(characteristic):
                raise InputError(f"characteristic must be prime, got {characteristic!r}")
            self.characteristic = int(characteristic)
        else:
            raise InputError(f"unknown field kind {kind!r}")
        self.kind = kind
        self._int64 = kind == PRIME and self.characteristic < _INT64_LIMIT

    # -- scalars ---------------------------------------------------------

    @property
    def dtype(self):
        return np.int64 if self._int64 else object

    def zero(self):
        return 0 if self.kind == PRIME else Fraction(0)

    def one(self):
        return 1 if self.kind == PRIME else Fraction(1)

    def coerce(self, x):
        if self.kind == PRIME:
            return int(x) % self.characteristic
        return Fraction(x)

    def neg(self, x):
        if self.kind == PRIME:
            return (-int(x)) % self.characteristic
        return -Fraction(x)

    def inv(self, x):
        if self.kind == PRIME:
            a = int(x) % self.characteristic
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.characteristic - 2, self.characteristic)
        f = Fraction(x)
        if f == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / f

    def parse(self, s: str):
        s = s.strip()
        if self.kind == PRIME:
            return int(s, 10) % self.characteristic
        return Fraction(s)

    def format(self, x) -> str:
        if self.kind == PRIME:
            return str(int(x) % self.characteristic)
        return str(Fraction(x))

    def sample(self, rng):
        """Pseudorandom element; small integers keep rational growth tame."""
        if self.kind == PRIME:
            return rng.randrange(self.characteristic)
        return Fraction(rng.randrange(-3, 4))

    def sample_nonzero(self, rng):
        while True:
            x = self.sample(rng)
            if x != 0:
                return x

    # -- array plumbing --------------------------------------------------

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self._int64:
            return arr % self.characteristic
        if self.kind == PRIME:
            p = self.characteristic
            out = np.empty(arr.shape, dtype=object)
            flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
            for i in range(flat_in.size):
                flat_out[i] = int(flat_in[i]) % p
            return out
        return arr

    def array(self, values, shape: Tuple[int, int]) -> np.ndarray:
        flat = [self.coerce(v) for v in values]
        if len(flat) != shape[0] * shape[1]:
            raise InputError(f"expected {shape[0] * shape[1]} entries, got {len(flat)}")
        out = np.empty(shape[0] * shape[1], dtype=self.dtype)
        for i, v in enumerate(flat):
            out[i] = v
        return out.reshape(shape)

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and self.kind == other.kind
            and self.characteristic == other.characteristic
        )

    def __hash__(self):
        return hash((self.kind, self.characteristic))

    def __repr__(self):
        if self.kind == PRIME:
            return f"Field(F_{self.characteristic})"
        return "Field(Q)"


def rational_field() -> Field:
    return Field(RATIONAL)


def prime_field(p: int) -> Field:
    return Field(PRIME, p)


class Matrix:
    """Dense matrix over a :class:`Field`; immutable by convention."""

    __slots__ = ("field", "data")

    def __init__(self, field: Field, data: np.ndarray):
        self.field = field
        self.data = data

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows: Sequence[Sequence]) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = [v for row in rows for v in row]
        return Matrix(field, field.array(flat, (nrows, ncols)))

    @staticmethod
    def from_entries(field: Field, nrows: int, ncols: int, entries: Sequence) -> "Matrix":
        return Matrix(field, field.array(entries, (nrows, ncols)))

    @staticmethod
    def zeros(field: Field, nrows: int, ncols: int) -> "Matrix":
        if field.dtype is object:
            arr = np.empty((nrows, ncols), dtype=object)
            arr[...] = field.zero()
            return Matrix(field, arr)
        return Matrix(field, np.zeros((nrows, ncols), dtype=np.int64))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        m = Matrix.zeros(field, n, n)
        one = field.one()
        for i in range(n):
            m.data[i, i] = one
        return m

    @staticmethod
    def column(field: Field, values: Sequence) -> "Matrix":
        return Matrix.from_entries(field, len(values), 1, values)

    # -- shape and access --------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def entries(self) -> list:
        return [x for x in self.data.reshape(-1)]

    def entry(self, i: int, j: int):
        return self.data[i, j]

    def to_lists(self) -> List[list]:
        return [list(row) for row in self.data]

    def format_entries(self) -> List[str]:
        return [self.field.format(x) for x in self.data.reshape(-1)]

    def column_vector(self, j: int) -> "Matrix":
        return Matrix(self.field, self.data[:, j : j + 1].copy())

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return Matrix(self.field, self.field.reduce(self.data.dot(other.data)))

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.reduce(self.data - other.data))

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.field.reduce(-self.data))

    def scale(self, c) -> "Matrix":
        c = self.field.coerce(c)
        return Matrix(self.field, self.field.reduce(self.data * c))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.data.T.copy())

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        raise TypeError("Matrix is not hashable; use signature()")

    def is_zero(self) -> bool:
        return self.data.size == 0 or not np.any(self.data != 0)

    def signature(self) -> tuple:
        if self.data.dtype == np.int64:
            return (self.rows, self.cols, self.data.tobytes())
        return (self.rows, self.cols, tuple(str(x) for x in self.data.reshape(-1)))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.to_lists()!r})"

    # -- stacking ----------------------------------------------------------

    @staticmethod
    def hstack(blocks: Sequence["Matrix"]) -> "Matrix":
        field = blocks[0].field
        return Matrix(field, np.hstack([b.data for b in blocks]))

    @staticmethod
    def vstack(blocks: Sequence["Matrix"]) -> "Matrix":
        field = blocks[0].field
        return Matrix(field, np.vstack([b.data for b in blocks]))

    @staticmethod
    def block_diag(field: Field, blocks: Sequence["Matrix"]) -> "Matrix":
        nr = sum(b.rows for b in blocks)
        nc = sum(b.cols for b in blocks)
        out = Matrix.zeros(field, nr, nc)
        r = c = 0
        for b in blocks:
            out.data[r : r + b.rows, c : c + b.cols] = b.data
            r += b.rows
            c += b.cols
        return out

    # -- elimination ---------------------------------------------------------

    def rref(self) -> Tuple["Matrix", List[int], int]:
        """Unique reduced row echelon form.

        Pivot choice is deterministic: leftmost nonzero column, topmost row.
        Returns (reduced matrix, pivot column list, rank).
        """
        field = self.field
        a = self.data.copy()
        nrows, ncols = a.shape
        pivots: List[int] = []
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            piv = None
            for i in range(r, nrows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            if piv != r:
                a[[r, piv]] = a[[piv, r]]
            inv = field.inv(a[r, c])
            a[r] = field.reduce(a[r] * inv)
            col = a[:, c].copy()
            col[r] = field.zero()
            if np.any(col != 0):
                a = field.reduce(a - np.outer(col, a[r]))
            pivots.append(c)
            r += 1
        return Matrix(field, a), pivots, len(pivots)

    def rank(self) -> int:
        return self.rref()[2]

    def kernel(self) -> "Matrix":
        """Basis of the right null space, one column per basis vector.

        The basis follows the standard pivot convention: each free column c
        yields a vector with 1 at c and minus the reduced column above the
        pivots.
        """
        field = self.field
        red, pivots, _ = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        out = Matrix.zeros(field, self.cols, len(free))
        one = field.one()
        for k, c in enumerate(free):
            out.data[c, k] = one
            for i, pc in enumerate(pivots):
                out.data[pc, k] = field.neg(red.data[i, c])
        return out

    def solve_cols(self, b: "Matrix") -> Optional["Matrix"]:
        """Particular solution X with self @ X = b, or None if inconsistent."""
        if b.rows != self.rows:
            raise InputError(f"rhs has {b.rows} rows, expected {self.rows}")
        aug = Matrix.hstack([self, b])
        red, pivots, _ = aug.rref()
        if any(p >= self.cols for p in pivots):
            return None
        x = Matrix.zeros(self.field, self.cols, b.cols)
        for i, pc in enumerate(pivots):
            x.data[pc, :] = red.data[i, self.cols :]
        return x

    def inverse(self) -> Optional["Matrix"]:
        if self.rows != self.cols:
            return None
        inv = self.solve_cols(Matrix.identity(self.field, self.rows))
        if inv is None:
            return None
        if (self @ inv) != Matrix.identity(self.field, self.rows):
            return None
        return inv


# function-style operation surface -------------------------------------------


def rref(m: Matrix) -> Tuple[Matrix, List[int], int]:
    return m.rref()


def kernel_basis(m: Matrix) -> List[Matrix]:
    k = m.kernel()
    return [k.column_vector(j) for j in range(k.cols)]


def solve(m: Matrix, b: Matrix) -> Optional[Matrix]:
    if b.cols != 1:
        raise InputError("solve expects a column vector")
    return m.solve_cols(b)


class RowSpan:
    """Incrementally maintained row space kept in reduced echelon form.

    Used for span membership tests and quotient-space canonical forms; the
    reduction is stable so canonical forms are reproducible across runs.
    """

    def __init__(self, field: Field, width: int):
        self.field = field
        self.width = width
        self.rows: List[np.ndarray] = []
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pivot_of(self, v: np.ndarray) -> Optional[int]:
        for j in range(self.width):
            if v[j] != 0:
                return j
        return None

    def reduce(self, v: np.ndarray) -> np.ndarray:
        field = self.field
        v = field.reduce(v.copy())
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                v = field.reduce(v - v[p] * row)
        return v

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(v) != 0)

    def add(self, v: np.ndarray) -> bool:
        """Insert v; returns True when the span grew."""
        field = self.field
        v = self.reduce(v)
        p = self._pivot_of(v)
        if p is None:
            return False
        v = field.reduce(v * field.inv(v[p]))
        for i, row in enumerate(self.rows):
            if row[p] != 0:
                self.rows[i] = field.reduce(row - row[p] * v)
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < p:
            pos += 1
        self.rows.insert(pos, v)
        self.pivots.insert(pos, p)
        return True

    def add_all(self, vectors) -> None:
        for v in vectors:
            self.add(v)

    def basis_matrix(self) -> Matrix:
        if not self.rows:
            return Matrix.zeros(self.field, 0, self.width)
        return Matrix(self.field, np.vstack(self.rows))
