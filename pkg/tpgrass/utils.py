"""Utility helpers."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Sequence, Union

import numpy as np

from .exceptions import InvalidArgumentsError

_INDEX_SEPARATORS = re.compile(r"[\s,{}]+")


def format_scalar(value: Union[Fraction, float, int]) -> str:
    """Render an exact value as ``a/b`` (or ``a``) and a float by its shortest repr."""
    if isinstance(value, (Fraction, int, np.integer)):
        return str(Fraction(int(value)) if isinstance(value, np.integer) else value)
    return repr(float(value))


def json_scalar(value: Union[Fraction, float, int]) -> Union[str, float]:
    """JSON-friendly scalar: exact values stay strings so nothing is rounded."""
    if isinstance(value, (Fraction, int, np.integer)):
        return format_scalar(value)
    return float(value)


def matrix_strings(matrix: np.ndarray) -> List[List[str]]:
    return [[format_scalar(x) for x in row] for row in matrix]


def parse_index_list(text: str) -> List[int]:
    """Parse ``"1,3"``, ``"{1,3}"`` or ``"1 3"``; a bare ``"13"`` reads as digits when N ≤ 9."""
    tokens = [t for t in _INDEX_SEPARATORS.split(text.strip()) if t]
    if len(tokens) == 1 and len(tokens[0]) > 1 and tokens[0].isdigit():
        tokens = list(tokens[0])
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise InvalidArgumentsError(f"cannot read index set from {text!r}") from exc


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InvalidArgumentsError(f"cannot read numbers from {text!r}") from exc


def geometric_mean_ratio(values: Sequence[float]) -> float:
    """Geometric mean of successive ratios ``values[i+1] / values[i]``; 0.0 when undefined."""
    if len(values) < 2 or values[0] <= 0 or values[-1] <= 0:
        return 0.0
    return float((values[-1] / values[0]) ** (1.0 / (len(values) - 1)))
