"""Index sets, Plücker coordinates and compound (exterior power) matrices.

Conventions: a subspace is the row space of its generator matrix and a matrix g acts by
``rows @ g.T``. Plücker coordinates are listed in lexicographic order of index sets.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .exceptions import InvalidArgumentsError
from .linalg import Scalar, ScalarMode, determinants, mode_of
from .models import Ambient, IndexSet, PluckerVector, Subspace


def enumerate_index_sets(N: int, k: int) -> Tuple[IndexSet, ...]:
    """All k-subsets of [1, N] in lexicographic order."""
    if N < 0 or not 0 <= k <= N:
        raise InvalidArgumentsError(f"need 0 <= k <= N, got N={N}, k={k}")
    return IndexSet.all_of_size(N, k)


def _column_blocks(rows: np.ndarray, index_sets: Tuple[IndexSet, ...]) -> np.ndarray:
    """Stack of the square submatrices ``rows[:, I]`` for every I, shaped (m, k, k)."""
    columns = np.array([s.columns for s in index_sets], dtype=int)
    return np.moveaxis(rows[:, columns], 1, 0)


def plucker_vector(E: Subspace) -> PluckerVector:
    index_sets = enumerate_index_sets(E.N, E.k)
    coords = determinants(_column_blocks(E.rows, index_sets), E.mode)
    return PluckerVector(E.ambient, tuple(coords), E.mode)


def normalize_sign(p: PluckerVector) -> PluckerVector:
    """The representative ±p whose first nonzero coordinate is positive."""
    scale = p.scale
    for value in p.coords:
        if not p.mode.is_zero(value, scale):
            return p if value > 0 else p.negated()
    return p if p.coords[0] >= 0 else p.negated()


def compound_matrix(g: np.ndarray, k: int, mode: Optional[ScalarMode] = None) -> np.ndarray:
    """The k-th compound: entry (J, I) is the minor of g on rows J and columns I."""
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidArgumentsError(f"compound_matrix needs a square matrix, got shape {g.shape}")
    N = g.shape[0]
    if not 1 <= k <= N:
        raise InvalidArgumentsError(f"k must lie in [1, {N}], got {k}")
    mode = mode or mode_of(g)
    sets = np.array([s.columns for s in enumerate_index_sets(N, k)], dtype=int)
    blocks = g[sets[:, None, :, None], sets[None, :, None, :]]
    m = len(sets)
    minors = determinants(blocks, mode)
    dtype = object if mode.is_exact else float
    return np.array(minors, dtype=dtype).reshape(m, m)


def act(g: np.ndarray, E: Subspace) -> Subspace:
    """The image g·E, generated by ``E.rows @ g.T``."""
    g = np.asarray(g)
    if g.shape != (E.N, E.N):
        raise InvalidArgumentsError(f"matrix of shape {g.shape} cannot act on V of dimension {E.N}")
    return Subspace(E.rows @ g.T, E.mode)


def plucker_relation(p: PluckerVector) -> Scalar:
    """p12·p34 − p13·p24 + p14·p23, which vanishes on decomposable vectors of Λ²(R⁴)."""
    if p.ambient != Ambient(4, 2):
        raise InvalidArgumentsError("the three-term relation applies to N=4, k=2")
    p12, p13, p14, p23, p24, p34 = p.coords
    return p12 * p34 - p13 * p24 + p14 * p23
