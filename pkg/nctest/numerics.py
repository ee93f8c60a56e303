import math
import numbers
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple, Union

import numpy as np


# Scalars are either exact rationals or doubles, never mixed inside one matrix.
Scalar = Union[Fraction, float]
Matrix = np.ndarray

DEFAULT_TOLERANCE: float = 1e-9


class NumericsException(Exception):
    pass


class ArithmeticEnum(Enum):
    ARITHMETIC_EXACT = "exact"
    ARITHMETIC_FLOAT = "float"


class Arithmetic:
    # The arithmetic policy for a single run. In exact mode every entry is a
    # Fraction held in a numpy object array and comparisons are exact. In float
    # mode entries are float64 and every comparison against zero goes through
    # the one tolerance below.

    def __init__(self, mode: ArithmeticEnum, tolerance: float = DEFAULT_TOLERANCE) -> None:
        if not (tolerance > 0.0) or not math.isfinite(tolerance):
            raise NumericsException(f"Tolerance must be a positive number, got {tolerance}!")
        self.mode = mode
        self.tolerance = float(tolerance)

    def __repr__(self) -> str:
        return f"Arithmetic(mode={self.mode.value!r}, tolerance={self.tolerance!r})"

    @property
    def exact(self) -> bool:
        return self.mode == ArithmeticEnum.ARITHMETIC_EXACT

    def scalar(self, value: object) -> Scalar:
        if isinstance(value, bool):
            raise NumericsException(f"Cannot interpret boolean {value} as a number!")

        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, numbers.Integral):
                return Fraction(int(value))
            if isinstance(value, numbers.Real):
                fvalue = float(value)
                if not math.isfinite(fvalue):
                    raise NumericsException(f"Cannot interpret {value} as a rational number!")
                # Shortest decimal representation, so 0.1 becomes 1/10.
                return Fraction(repr(fvalue))
            if isinstance(value, str):
                try:
                    return Fraction(value.strip())
                except (ValueError, ZeroDivisionError):
                    raise NumericsException(f"Cannot interpret \"{value}\" as a rational number!")
            raise NumericsException(f"Cannot interpret {value!r} as a number!")

        if isinstance(value, (numbers.Real, Fraction)):
            fvalue = float(value)
        elif isinstance(value, str):
            try:
                fvalue = float(Fraction(value.strip()))
            except (ValueError, ZeroDivisionError):
                raise NumericsException(f"Cannot interpret \"{value}\" as a number!")
        else:
            raise NumericsException(f"Cannot interpret {value!r} as a number!")
        if not math.isfinite(fvalue):
            raise NumericsException(f"Cannot interpret {value} as a finite number!")
        return fvalue

    def zeros(self, rows: int, cols: int) -> Matrix:
        if rows < 0 or cols < 0:
            raise NumericsException(f"Invalid matrix shape {rows}x{cols}!")
        if self.exact:
            return np.full((rows, cols), Fraction(0), dtype=object)
        return np.zeros((rows, cols), dtype=np.float64)

    def identity(self, size: int) -> Matrix:
        out = self.zeros(size, size)
        for i in range(size):
            out[i, i] = self.scalar(1)
        return out

    def matrix(self, rows: Any, cols: Optional[int] = None) -> Matrix:
        data = [[self.scalar(v) for v in row] for row in rows]
        if not data:
            return self.zeros(0, cols or 0)
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise NumericsException("Rows of a matrix must all have the same length!")
        if cols is not None and width != cols:
            raise NumericsException(f"Expected rows of length {cols}, got rows of length {width}!")

        out = self.zeros(len(data), width)
        for i, row in enumerate(data):
            for j, value in enumerate(row):
                out[i, j] = value
        return out

    def vector(self, values: Any) -> Matrix:
        data = [self.scalar(v) for v in values]
        if self.exact:
            out = np.full((len(data),), Fraction(0), dtype=object)
            for i, value in enumerate(data):
                out[i] = value
            return out
        return np.array(data, dtype=np.float64)

    def convert(self, a: Matrix) -> Matrix:
        # Re-home a matrix or vector produced under a different arithmetic.
        if a.ndim == 1:
            return self.vector(a.tolist())
        return self.matrix(a.tolist(), cols=a.shape[1])

    def is_zero(self, x: Scalar) -> bool:
        if self.exact:
            return x == 0
        return abs(x) <= self.tolerance

    def is_positive(self, x: Scalar) -> bool:
        if self.exact:
            return x > 0
        return x > self.tolerance

    def is_negative(self, x: Scalar) -> bool:
        if self.exact:
            return x < 0
        return x < -self.tolerance

    def is_nonnegative(self, x: Scalar) -> bool:
        return not self.is_negative(x)

    def equal(self, x: Scalar, y: Scalar) -> bool:
        return self.is_zero(x - y)

    def clean(self, a: Matrix) -> Matrix:
        # Snap float entries within tolerance of zero to exactly zero.
        out = a.copy()
        if not self.exact and out.size > 0:
            out[np.abs(out) <= self.tolerance] = 0.0
        return out


def transpose(a: Matrix) -> Matrix:
    return a.T.copy()


def matmul(arith: Arithmetic, a: Matrix, b: Matrix) -> Matrix:
    if a.ndim != 2 or b.ndim not in {1, 2}:
        raise NumericsException(f"Cannot multiply arrays of dimension {a.ndim} and {b.ndim}!")
    if a.shape[1] != b.shape[0]:
        raise NumericsException(f"Cannot multiply a {a.shape[0]}x{a.shape[1]} matrix by an operand with {b.shape[0]} rows!")
    if a.shape[1] == 0:
        # Empty inner dimension, numpy gives back integer zeros for object arrays.
        if b.ndim == 1:
            return arith.vector([0] * a.shape[0])
        return arith.zeros(a.shape[0], b.shape[1])
    return a @ b


def outer(arith: Arithmetic, column: Matrix, row: Matrix) -> Matrix:
    out = arith.zeros(column.shape[0], row.shape[0])
    for i in range(column.shape[0]):
        for j in range(row.shape[0]):
            out[i, j] = column[i] * row[j]
    return out


def rref(arith: Arithmetic, a: Matrix) -> Tuple[Matrix, List[int]]:
    # Reduced row-echelon form. Exact mode pivots on the first nonzero entry
    # of a column so the result only depends on the input, float mode uses
    # partial pivoting by largest absolute value and drops entries below the
    # tolerance.
    m = a.copy()
    rows, cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break

        pivot: Optional[int] = None
        if arith.exact:
            for i in range(r, rows):
                if m[i, c] != 0:
                    pivot = i
                    break
        else:
            best = max(range(r, rows), key=lambda i: abs(m[i, c]))
            if abs(m[best, c]) > arith.tolerance:
                pivot = best
        if pivot is None:
            if not arith.exact:
                m[r:, c] = 0.0
            continue

        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r:
                factor = m[i, c]
                if not arith.is_zero(factor):
                    m[i] = m[i] - factor * m[r]
                if not arith.exact:
                    m[i, c] = 0.0
        if not arith.exact:
            m = arith.clean(m)

        pivots.append(c)
        r += 1

    if not arith.exact:
        m[r:] = 0.0
    return m, pivots


def rank(arith: Arithmetic, a: Matrix) -> int:
    if a.size == 0:
        return 0
    return len(rref(arith, a)[1])


def row_space_basis(arith: Arithmetic, v: Matrix) -> Matrix:
    reduced, pivots = rref(arith, v)
    return reduced[:len(pivots)].copy()


def inverse(arith: Arithmetic, a: Matrix) -> Matrix:
    size = a.shape[0]
    if a.shape != (size, size):
        raise NumericsException(f"Cannot invert a non-square {a.shape[0]}x{a.shape[1]} matrix!")
    if size == 0:
        return arith.zeros(0, 0)

    augmented = np.concatenate([a, arith.identity(size)], axis=1)
    reduced, pivots = rref(arith, augmented)
    if pivots[:size] != list(range(size)):
        raise NumericsException("Cannot invert a singular matrix!")
    return reduced[:, size:].copy()


def split_idempotent(arith: Arithmetic, v: Matrix, ambient_dim: int) -> Tuple[Matrix, Matrix]:
    # Returns (inclusion, projection) for the span of the rows of v. The
    # inclusion has the basis vectors as columns, the projection is its
    # Moore-Penrose pseudoinverse, so projection . inclusion = identity and
    # inclusion . projection is the orthogonal projector onto the span.
    if v.ndim != 2 or v.shape[1] != ambient_dim:
        raise NumericsException(f"Rows must have length {ambient_dim} to split over that ambient space!")

    basis = row_space_basis(arith, v)
    inclusion = transpose(basis)
    if basis.shape[0] == 0:
        return inclusion, arith.zeros(0, ambient_dim)

    if arith.exact:
        gram = matmul(arith, basis, inclusion)
        projection = matmul(arith, inverse(arith, gram), basis)
    else:
        projection = np.linalg.pinv(inclusion.astype(np.float64))
    return inclusion, projection


def span_residual(arith: Arithmetic, inclusion: Matrix, projection: Matrix, v: Matrix) -> Scalar:
    # How far a vector (or each row of a matrix) is from the span described by
    # an inclusion/projection pair.
    if v.ndim == 1:
        return max_abs(matmul(arith, inclusion, matmul(arith, projection, v)) - v)
    rows = transpose(v)
    return max_abs(matmul(arith, inclusion, matmul(arith, projection, rows)) - rows)


def max_abs(a: Matrix) -> Scalar:
    if a.size == 0:
        return Fraction(0) if a.dtype == object else 0.0
    return max(abs(x) for x in a.flat)


def nonzero_count(arith: Arithmetic, a: Matrix) -> int:
    return sum(1 for x in a.flat if not arith.is_zero(x))


def format_scalar(x: Scalar) -> Union[str, float]:
    # Rationals serialize as "p/q" (or "p" when integral), floats as numbers.
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def to_jsonable(a: Matrix) -> List[Any]:
    if a.ndim == 1:
        return [format_scalar(x) for x in a]
    return [[format_scalar(x) for x in row] for row in a]
