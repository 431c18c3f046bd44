"""
Exact scalar arithmetic and dense exact linear algebra.

Two kinds of fields are supported: prime fields GF(p), whose elements are
Python ints in [0, p) stored in int64 numpy arrays, and the rationals, whose
elements are ``fractions.Fraction`` values stored in object arrays. No
floating point is used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from sympy import isprime

from .errors import ParseError, SingularMatrix

logger = structlog.get_logger(__name__)

Scalar = Union[int, Fraction]

# Largest prime whose products still fit comfortably in int64 row operations
_INT64_PRIME_LIMIT = 1 << 20
_PRIME_LIMIT = 1 << 31


@dataclass(frozen=True)
class Field:
    """A prime field GF(char) or, when ``char == 0``, the rationals."""

    char: int

    def __post_init__(self):
        if self.char != 0 and (self.char >= _PRIME_LIMIT or not isprime(self.char)):
            raise ParseError(f"Unsupported field characteristic: {self.char}")

    @property
    def is_rational(self) -> bool:
        return self.char == 0

    @property
    def is_finite(self) -> bool:
        return self.char != 0

    @property
    def dtype(self):
        if self.is_finite and self.char < _INT64_PRIME_LIMIT:
            return np.int64
        return object

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.is_rational else 1

    def element(self, value) -> Scalar:
        """Coerce an int, Fraction, numpy integer or string into this field."""
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, np.integer):
            value = int(value)
        if self.is_rational:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.char == 0:
                raise ParseError(f"{value} has no image in GF({self.char})")
            return (value.numerator * pow(value.denominator, -1, self.char)) % self.char
        return int(value) % self.char

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b if self.is_rational else (a + b) % self.char

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b if self.is_rational else (a - b) % self.char

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b if self.is_rational else (a * b) % self.char

    def neg(self, a: Scalar) -> Scalar:
        return -a if self.is_rational else (-a) % self.char

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.char)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def elements(self) -> Iterator[Scalar]:
        if self.is_rational:
            raise ValueError("the rationals cannot be enumerated")
        return iter(range(self.char))

    def nonzero_elements(self) -> Iterator[Scalar]:
        if self.is_rational:
            raise ValueError("the rationals cannot be enumerated")
        return iter(range(1, self.char))

    def parse(self, text: str) -> Scalar:
        """Parse the JSON scalar form: "3" or "3/7"."""
        try:
            return self.element(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Invalid scalar '{text}': {e}") from e

    def format(self, value: Scalar) -> str:
        if self.is_rational:
            value = Fraction(value)
            if value.denominator == 1:
                return str(value.numerator)
            return f"{value.numerator}/{value.denominator}"
        return str(int(value))

    def coerce_array(self, values) -> np.ndarray:
        """Return a fresh array of canonical field elements."""
        arr = np.asarray(values, dtype=object)
        if arr.size == 0:
            return self.zeros(arr.shape)
        reduced = np.vectorize(self.element, otypes=[object])(arr)
        return reduced if self.is_rational else reduced.astype(self.dtype)

    def zeros(self, shape) -> np.ndarray:
        if self.is_rational:
            return np.full(shape, Fraction(0), dtype=object)
        return np.zeros(shape, dtype=self.dtype)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Reduce an integer array produced by ring operations back into the field."""
        if self.is_rational:
            return arr
        return np.mod(arr, self.char)

    def to_json(self):
        return "rational" if self.is_rational else {"char": self.char}

    @classmethod
    def from_json(cls, value) -> "Field":
        if value == "rational":
            return RATIONALS
        if isinstance(value, dict) and "char" in value:
            return gf(int(value["char"]))
        raise ParseError(f"Invalid field description: {value!r}")

    def __str__(self) -> str:
        return "QQ" if self.is_rational else f"GF({self.char})"


RATIONALS = Field(0)


@lru_cache(maxsize=None)
def gf(p: int) -> Field:
    return Field(p)


def parse_field(text: str) -> Field:
    """Parse a CLI field spec: 'QQ', 'rational', 'GF(5)', 'gf5' or '5'."""
    cleaned = text.strip().lower().replace("gf", "").strip("()")
    if cleaned in ("qq", "q", "rational", "rationals"):
        return RATIONALS
    try:
        return gf(int(cleaned))
    except ValueError as e:
        raise ParseError(f"Invalid field '{text}'") from e


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    field: Field
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"ExactMatrix needs a 2-d array, got shape {self.data.shape}")
        self.data.setflags(write=False)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: Optional[int] = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(field, field.zeros((0, cols or 0)))
        return cls(field, field.coerce_array(rows))

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        data = field.zeros((n, n))
        for i in range(n):
            data[i, i] = field.one
        return cls(field, data)

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "ExactMatrix":
        return cls(field, field.zeros((rows, cols)))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def __getitem__(self, key):
        return self.data[key]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.field != other.field:
            raise ValueError("matrices over different fields")
        if self.field.is_finite and self.field.dtype is np.int64:
            # Per-row reduction keeps int64 sums exact for long inner dimensions.
            product = np.zeros((self.rows, other.cols), dtype=np.int64)
            for k in range(self.cols):
                product = (product + np.outer(self.data[:, k], other.data[k, :])) % self.field.char
            return ExactMatrix(self.field, product)
        return ExactMatrix(self.field, self.field.reduce(self.data.dot(other.data)))

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.data.T.copy())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        block = self.data[np.ix_(list(rows), list(cols))] if rows and cols else self.field.zeros((len(rows), len(cols)))
        return ExactMatrix(self.field, block.copy())

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def to_lists(self) -> List[List[Scalar]]:
        return [[self.data[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def to_json(self):
        return {
            "field": self.field.to_json(),
            "rows": [[self.field.format(v) for v in row] for row in self.to_lists()],
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.all(self.data == other.data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.format(v) for v in row) for row in self.to_lists())
        return f"ExactMatrix<{self.field}>[{body}]"


def _rref_mod_p(arr: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Gauss-Jordan elimination over GF(p), first nonzero entry as pivot."""
    A = np.mod(arr.copy(), p)
    nrows, ncols = A.shape
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        candidates = np.flatnonzero(A[r:, col])
        if candidates.size == 0:
            continue
        i = r + int(candidates[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, col]), -1, p)
        if inv != 1:
            A[r] = (A[r] * inv) % p
        rows = np.flatnonzero(A[:, col])
        rows = rows[rows != r]
        if rows.size:
            A[rows] = (A[rows] - np.outer(A[rows, col], A[r])) % p
        pivots.append(col)
        r += 1
    return A, pivots


def _row_content(row: np.ndarray) -> int:
    return math.gcd(*(int(v) for v in row))


def _rref_rational(arr: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """
    Fraction-free Gauss-Jordan elimination over the rationals.

    Rows are cleared to primitive integer vectors first; every elimination
    step keeps integers (row_j <- pivot*row_j - a*row_pivot) and divides the
    new row by its content, so coefficient growth stays bounded. Pivot rows
    are divided by their pivots only at the end.
    """
    nrows, ncols = arr.shape
    A = np.empty((nrows, ncols), dtype=object)
    for i in range(nrows):
        row = [RATIONALS.element(v) for v in arr[i]]
        scale = math.lcm(*(v.denominator for v in row))
        A[i] = [int(v * scale) for v in row]
        g = _row_content(A[i]) if ncols else 0
        if g > 1:
            A[i] = A[i] // g
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        candidates = np.flatnonzero(A[r:, col] != 0)
        if candidates.size == 0:
            continue
        i = r + int(candidates[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        pivot = A[r, col]
        rows = np.flatnonzero(A[:, col] != 0)
        for j in rows:
            if j == r:
                continue
            A[j] = pivot * A[j] - A[j, col] * A[r]
            g = _row_content(A[j])
            if g > 1:
                A[j] = A[j] // g
        pivots.append(col)
        r += 1
    R = np.full((nrows, ncols), Fraction(0), dtype=object)
    for i, col in enumerate(pivots):
        pivot = A[i, col]
        R[i] = [Fraction(int(v), int(pivot)) for v in A[i]]
    return R, pivots


def _rref_array(field: Field, arr: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    if field.is_rational:
        return _rref_rational(arr)
    return _rref_mod_p(arr, field.char)


def rref(M: ExactMatrix) -> Tuple[ExactMatrix, int, List[int]]:
    """Reduced row echelon form, rank and pivot columns of ``M``."""
    R, pivots = _rref_array(M.field, M.data)
    return ExactMatrix(M.field, R), len(pivots), pivots


def matrix_rank(M: ExactMatrix) -> int:
    return len(_rref_array(M.field, M.data)[1])


def kernel_basis(M: ExactMatrix) -> List[Tuple[Scalar, ...]]:
    """
    Canonical basis of {v : Mv = 0}: one vector per free column of the RREF,
    with a 1 in that column and minus the RREF entries at the pivot columns.
    """
    field = M.field
    R, pivots = _rref_array(field, M.data)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        v = [field.zero] * M.cols
        v[free] = field.one
        for i, col in enumerate(pivots):
            v[col] = field.neg(R[i, free])
        basis.append(tuple(v))
    return basis


def solve(M: ExactMatrix, rhs: Sequence[Scalar]) -> Optional[Tuple[Scalar, ...]]:
    """A particular solution of Mx = rhs, or None when the system is inconsistent."""
    field = M.field
    column = field.coerce_array(list(rhs)).reshape(-1, 1)
    if column.shape[0] != M.rows:
        raise ValueError(f"right-hand side has length {column.shape[0]}, expected {M.rows}")
    augmented = np.concatenate([M.data, column], axis=1)
    R, pivots = _rref_array(field, augmented)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [field.zero] * M.cols
    for i, col in enumerate(pivots):
        x[col] = R[i, M.cols]
    return tuple(x)


def invert(M: ExactMatrix) -> ExactMatrix:
    """Inverse of a square matrix; raises SingularMatrix when rank < size."""
    if M.rows != M.cols:
        raise ValueError(f"cannot invert a {M.rows}x{M.cols} matrix")
    n = M.rows
    augmented = np.concatenate([M.data, ExactMatrix.identity(M.field, n).data], axis=1)
    R, pivots = _rref_array(M.field, augmented)
    rank = sum(1 for c in pivots if c < n)
    if rank < n:
        raise SingularMatrix(f"matrix of size {n} is singular", {"rank": rank})
    return ExactMatrix(M.field, R[:, n:].copy())


def row_space_basis(field: Field, vectors: np.ndarray) -> np.ndarray:
    """Nonzero rows of the RREF of ``vectors``: a canonical basis of their span."""
    if vectors.shape[0] == 0:
        return vectors
    R, pivots = _rref_array(field, vectors)
    return R[: len(pivots)].copy()


def in_span_mod_p(generators: np.ndarray, target: np.ndarray, p: int) -> Optional[np.ndarray]:
    """
    Coefficients x with generators @ x = target over GF(p), or None.

    ``generators`` has one column per spanning vector. This is the hot path
    of the partition-rank search, so it skips the ExactMatrix wrapper.
    """
    augmented = np.concatenate([generators, target.reshape(-1, 1)], axis=1)
    R, pivots = _rref_mod_p(augmented, p)
    ncols = generators.shape[1]
    if pivots and pivots[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=generators.dtype)
    for i, col in enumerate(pivots):
        x[col] = R[i, ncols]
    return x
