"""Scalar backends: exact rationals and floating point behind one set of matrix routines.

Exact matrices are numpy object arrays of :class:`fractions.Fraction`; floating matrices are
``float64`` arrays. Every routine dispatches on a :class:`ScalarMode`, so callers keep a single
code path for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLERANCE
from .exceptions import InvalidArgumentsError, ModeMismatchError

Scalar = Union[Fraction, float]


class Mode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class ScalarMode:
    """Arithmetic used for a computation and, in floating mode, its zero test."""

    kind: Mode = Mode.EXACT
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Mode(self.kind))
        if self.tolerance < 0:
            raise InvalidArgumentsError("tolerance must be nonnegative")

    @classmethod
    def exact(cls) -> "ScalarMode":
        return cls(Mode.EXACT)

    @classmethod
    def floating(cls, tolerance: float = DEFAULT_TOLERANCE) -> "ScalarMode":
        return cls(Mode.FLOAT, tolerance)

    @property
    def is_exact(self) -> bool:
        return self.kind is Mode.EXACT

    def is_zero(self, value: Scalar, scale: float) -> bool:
        """Zero test; floating mode compares against ``tolerance * scale``."""
        if self.is_exact:
            return value == 0
        return abs(value) <= self.tolerance * scale

    def coerce(self, value: object) -> Scalar:
        return _exact_scalar(value) if self.is_exact else _float_scalar(value)


def _exact_scalar(value: object) -> Fraction:
    if isinstance(value, (bool, np.bool_)):
        raise InvalidArgumentsError(f"not a scalar: {value!r}")
    if isinstance(value, (Integral, Rational, np.integer)):
        return Fraction(int(value)) if isinstance(value, np.integer) else Fraction(value)
    if isinstance(value, str):
        if any(ch in value for ch in ".eE"):
            raise ModeMismatchError(f"decimal literal {value!r} is not allowed in exact mode")
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentsError(f"not a rational number: {value!r}") from exc
    raise ModeMismatchError(f"{type(value).__name__} value {value!r} cannot enter exact mode")


def _float_scalar(value: object) -> float:
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentsError(f"not a number: {value!r}") from exc
    return float(value)  # type: ignore[arg-type]


def infer_mode(values: Iterable[object], tolerance: float = DEFAULT_TOLERANCE) -> ScalarMode:
    """Exact unless some entry is a float or a decimal literal."""
    for value in values:
        if isinstance(value, (float, np.floating)):
            return ScalarMode.floating(tolerance)
        if isinstance(value, str) and any(ch in value for ch in ".eE"):
            return ScalarMode.floating(tolerance)
    return ScalarMode.exact()


def as_matrix(data: object, mode: ScalarMode) -> np.ndarray:
    """Return a fresh 2-D array of ``data`` in the representation of ``mode``."""
    if isinstance(data, np.ndarray) and data.ndim == 2:
        rows: Sequence[Sequence[object]] = data.tolist() if data.dtype != object else list(data)
    else:
        rows = [list(row) for row in data]  # type: ignore[union-attr]
    if not rows or any(len(row) != len(rows[0]) for row in rows):
        raise InvalidArgumentsError("matrix rows must be nonempty and of equal length")
    if mode.is_exact:
        return np.array([[_exact_scalar(x) for x in row] for row in rows], dtype=object)
    return np.array([[_float_scalar(x) for x in row] for row in rows], dtype=float)


def mode_of(matrix: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> ScalarMode:
    """Object and integer arrays are exact, everything else floating."""
    if matrix.dtype == object or np.issubdtype(matrix.dtype, np.integer):
        return ScalarMode.exact()
    return ScalarMode.floating(tolerance)


# Exact kernels --------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[int]], int]:
    """Clear denominators row by row; returns the integer rows and the product of multipliers."""
    scale = 1
    result = []
    for row in rows:
        multiplier = math.lcm(*(Fraction(x).denominator for x in row)) if len(row) else 1
        result.append([int(Fraction(x) * multiplier) for x in row])
        scale *= multiplier
    return result, scale


def bareiss_determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination on the integer-scaled matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m, scale = _integer_rows(rows)
    sign = 1
    previous = 1
    for i in range(n - 1):
        if m[i][i] == 0:
            for p in range(i + 1, n):
                if m[p][i] != 0:
                    m[i], m[p] = m[p], m[i]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[i][i]
        for j in range(i + 1, n):
            factor = m[j][i]
            row_j, row_i = m[j], m[i]
            for c in range(i + 1, n):
                row_j[c] = (row_j[c] * pivot - factor * row_i[c]) // previous
            row_j[i] = 0
        previous = pivot
    return Fraction(sign * m[n - 1][n - 1], scale)


def _integer_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    m, _ = _integer_rows(rows)
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    previous = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot_row = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, n_rows):
            factor = m[r][col]
            row_r, row_p = m[r], m[rank]
            for c in range(col + 1, n_cols):
                row_r[c] = (row_r[c] * pivot - factor * row_p[c]) // previous
            row_r[col] = 0
        previous = pivot
        rank += 1
    return rank


def _reduced_row_echelon(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if m[i][col] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


# Dispatching routines -------------------------------------------------


def determinants(stack: np.ndarray, mode: ScalarMode) -> List[Scalar]:
    """Determinants of a stack of square matrices shaped ``(..., n, n)``, flattened."""
    flat = stack.reshape((-1,) + stack.shape[-2:])
    if mode.is_exact:
        return [bareiss_determinant(block.tolist()) for block in flat]
    if flat.shape[-1] == 0:
        return [1.0] * flat.shape[0]
    return [float(x) for x in np.linalg.det(flat)]


def rank(matrix: np.ndarray, mode: ScalarMode) -> int:
    if matrix.size == 0:
        return 0
    if mode.is_exact:
        return _integer_rank(matrix.tolist())
    singular = np.linalg.svd(matrix, compute_uv=False)
    return int(np.count_nonzero(singular > mode.tolerance * singular[0]))


def null_space(matrix: np.ndarray, mode: ScalarMode) -> np.ndarray:
    """Rows spanning ``{x : matrix @ x = 0}``."""
    n_cols = matrix.shape[1]
    if mode.is_exact:
        reduced, pivots = _reduced_row_echelon(matrix.tolist())
        free = [c for c in range(n_cols) if c not in pivots]
        basis = []
        for f in free:
            vector = [Fraction(0)] * n_cols
            vector[f] = Fraction(1)
            for row, p in zip(reduced, pivots):
                vector[p] = -row[f]
            basis.append(vector)
        return np.array(basis, dtype=object).reshape(len(basis), n_cols)
    return scipy.linalg.null_space(matrix, rcond=mode.tolerance).T


def intersect_rows(first: np.ndarray, second: np.ndarray, mode: ScalarMode) -> np.ndarray:
    """Basis rows of rowspace(first) ∩ rowspace(second); both inputs must have full row rank."""
    stacked = np.vstack([first, second])
    coefficients = null_space(stacked.T, mode)
    if coefficients.shape[0] == 0:
        dtype = object if mode.is_exact else float
        return np.zeros((0, first.shape[1]), dtype=dtype)
    return coefficients[:, : first.shape[0]] @ first


def orthonormal_rows(rows: np.ndarray) -> np.ndarray:
    """Orthonormal basis rows of the same row space."""
    q, _ = np.linalg.qr(np.asarray(rows, dtype=float).T)
    return q.T


CONTAINMENT_FLOOR = 1e-10


def row_space_contains(outer: np.ndarray, inner: np.ndarray, mode: ScalarMode) -> bool:
    """Whether every row of ``inner`` lies in the row space of ``outer``.

    Floating mode measures the residual after projecting onto an orthonormal basis of
    ``outer``; the threshold never drops below :data:`CONTAINMENT_FLOOR`, so a strict sign
    mode (tolerance 0) still recognises containment that holds by construction.
    """
    if mode.is_exact:
        return rank(np.vstack([outer, inner]), mode) == rank(outer, mode)
    basis = orthonormal_rows(outer)
    inner = np.asarray(inner, dtype=float)
    residual = inner - (inner @ basis.T) @ basis
    size = float(np.max(np.linalg.norm(inner, axis=1))) if inner.size else 0.0
    return float(np.max(np.linalg.norm(residual, axis=1), initial=0.0)) <= max(mode.tolerance, CONTAINMENT_FLOOR) * size
