"""Classification of subspaces against the positive, nonnegative, all-nonzero and generic loci.

All subspace comparisons go through ranks of stacked generator matrices.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import CertificationError, PreconditionViolationError
from .exterior import enumerate_index_sets, normalize_sign, plucker_vector
from .linalg import ScalarMode, intersect_rows, rank, row_space_contains
from .models import Classification, FlagPair, IndexSet, PluckerVector, SignPattern, Subspace

logger = logging.getLogger(__name__)


def coordinate_rows(index_set: IndexSet, N: int, mode: ScalarMode) -> np.ndarray:
    """Generator rows e_i (i ∈ I) of the coordinate subspace V_I."""
    index_set.check_within(N)
    rows = [[mode.coerce(1 if j == i else 0) for j in range(1, N + 1)] for i in index_set]
    dtype = object if mode.is_exact else float
    return np.array(rows, dtype=dtype).reshape(len(index_set), N)


def intersection_dim(E: Subspace, index_set: IndexSet) -> int:
    """dim(E ∩ V_I) = k + |I| − rank[E; V_I]."""
    if not index_set:
        index_set.check_within(E.N)
        return 0
    stacked = np.vstack([E.rows, coordinate_rows(index_set, E.N, E.mode)])
    return E.k + len(index_set) - rank(stacked, E.mode)


def _check_gr_prime(E: Subspace, p: PluckerVector) -> Tuple[bool, Optional[IndexSet]]:
    witness: Optional[IndexSet] = None
    mismatches: List[str] = []
    for index_set in enumerate_index_sets(E.N, E.N - E.k):
        meets = intersection_dim(E, index_set) > 0
        if meets and witness is None:
            witness = index_set
        complement = index_set.complement(E.N)
        if meets != p.is_zero_at(complement):
            mismatches.append(f"I={index_set}, coordinate {complement}")
    if mismatches:
        message = "rank and minor criteria disagree at " + "; ".join(mismatches)
        if E.mode.is_exact:
            raise CertificationError(message)
        logger.warning(message)
    return witness is None, witness


def in_gr_prime(E: Subspace) -> Tuple[bool, Optional[IndexSet]]:
    """Whether E meets every V_I with |I| = N−k trivially; else the first such I that it meets.

    The verdict is cross-checked coordinate by coordinate against the vanishing of the
    Plücker coordinate at [1,N]∖I.
    """
    return _check_gr_prime(E, plucker_vector(E))


def sign_classify(p: PluckerVector) -> SignPattern:
    q = normalize_sign(p)
    scale = q.scale
    zero = [q.mode.is_zero(c, scale) for c in q.coords]
    all_nonzero = not any(zero)
    nonnegative = all(z or c > 0 for z, c in zip(zero, q.coords))
    positive = all_nonzero and nonnegative
    margin = float(min(abs(c) for c in q.coords)) / scale

    witness = None
    if not all_nonzero:
        witness = q.index_sets[zero.index(True)]
    elif not positive:
        witness = next(s for s, c in zip(q.index_sets, q.coords) if c < 0)
    return SignPattern(positive, nonnegative, all_nonzero, margin, witness)


def _check_ends(E: Subspace) -> None:
    if intersection_dim(E, IndexSet.interval(1, E.N - E.k)) > 0:
        raise PreconditionViolationError(f"E meets V_[1,{E.N - E.k}]", tag="i")
    if intersection_dim(E, IndexSet.interval(E.k + 1, E.N)) > 0:
        raise PreconditionViolationError(f"E meets V_[{E.k + 1},{E.N}]", tag="ii")


def _flag_member(rows: np.ndarray, dim: int, mode: ScalarMode, name: str) -> Subspace:
    if rows.shape[0] != dim or rank(rows, mode) != dim:
        raise CertificationError(f"{name} has dimension {rank(rows, mode)}, expected {dim}")
    return Subspace(rows, mode)


def build_flags(E: Subspace) -> FlagPair:
    """The chains E_i and E'_i; needs E ∩ V_[1,N−k] = 0 and E ∩ V_[k+1,N] = 0."""
    _check_ends(E)
    N, k, mode = E.N, E.k, E.mode
    lower: List[Subspace] = []
    upper: List[Subspace] = []
    for i in range(1, N):
        if i < k:
            low = intersect_rows(E.rows, coordinate_rows(IndexSet.interval(1, N - k + i), N, mode), mode)
            up = intersect_rows(E.rows, coordinate_rows(IndexSet.interval(k - i + 1, N), N, mode), mode)
        elif i == k:
            lower.append(E)
            upper.append(E)
            continue
        else:
            low = np.vstack([E.rows, coordinate_rows(IndexSet.interval(1, i - k), N, mode)])
            up = np.vstack([E.rows, coordinate_rows(IndexSet.interval(N - i + k + 1, N), N, mode)])
        lower.append(_flag_member(low, i, mode, f"E_{i}"))
        upper.append(_flag_member(up, i, mode, f"E'_{i}"))
    return FlagPair(tuple(lower), tuple(upper))


def _meet_dim(first: Subspace, second: Subspace) -> int:
    return first.k + second.k - rank(np.vstack([first.rows, second.rows]), first.mode)


def _contains(outer: Subspace, inner: Subspace) -> bool:
    return row_space_contains(outer.rows, inner.rows, outer.mode)


def is_generic(E: Subspace) -> Tuple[bool, Optional[str]]:
    """Conditions (i)–(iv) on the flags of E; returns the first failing tag.

    In floating mode a flag member that loses dimension counts as a failure tagged
    ``"flags"``. In exact mode the same event raises :class:`CertificationError`.
    """
    try:
        flags = build_flags(E)
    except PreconditionViolationError as exc:
        return False, exc.tag
    except CertificationError as exc:
        if E.mode.is_exact:
            raise
        logger.warning("flag construction degenerate in floating mode: %s", exc)
        return False, "flags"
    N, k = E.N, E.k
    for i in range(1, k):
        if _meet_dim(flags.e_prime(i), flags.e(k - i)) != 0:
            return False, f"iii(i={i})"
    for i in range(1, N - k):
        upper, lower = flags.e_prime(k + i), flags.e(N - i)
        if _meet_dim(upper, lower) != k or not (_contains(upper, E) and _contains(lower, E)):
            return False, f"iv(i={i})"
    return True, None


def classify(E: Subspace) -> Classification:
    p = plucker_vector(E)
    in_prime, _ = _check_gr_prime(E, p)
    signs = sign_classify(p)
    generic, tag = is_generic(E)

    if in_prime != signs.all_nonzero:
        logger.warning("rank verdict %s and sign verdict %s differ in floating mode", in_prime, signs.all_nonzero)
    if signs.all_nonzero and not generic:
        message = f"all Plücker coordinates nonzero but genericity fails at ({tag})"
        if E.mode.is_exact:
            raise CertificationError(message)
        logger.warning(message)

    return Classification(
        positive=signs.positive,
        nonnegative=signs.nonnegative,
        all_nonzero=signs.all_nonzero,
        generic=generic,
        failed_condition=tag,
        witness=signs.witness,
        margin=signs.margin,
    )
