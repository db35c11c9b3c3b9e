"""Seeded generators of test subspaces, one per stratum."""

from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import CertificationError, GenerationFailureError, GrassmannError, InvalidArgumentsError
from .exterior import plucker_vector
from .flow import apply_flow
from .linalg import ScalarMode, as_matrix, rank
from .membership import classify, coordinate_rows, sign_classify
from .models import Ambient, IndexSet, Subspace

logger = logging.getLogger(__name__)

MAX_RANK_RETRIES = 100
MAX_MIXED_RETRIES = 500


class SamplerKind(str, Enum):
    VANDERMONDE = "vandermonde"
    COORDINATE = "coordinate"
    RANDOM_RATIONAL = "random_rational"
    FLOWED_COORDINATE = "flowed_coordinate"
    MIXED_SIGN = "mixed_sign"


class SamplerSpec(BaseModel):
    """Everything needed to regenerate a sample bit for bit."""

    model_config = ConfigDict(frozen=True)

    kind: SamplerKind
    N: int = Field(..., ge=2, description="Dimension of V.")
    k: Optional[int] = Field(None, ge=1, description="Subspace dimension; implied by nodes or index_set.")
    seed: int = Field(0, ge=0, lt=2**64)
    index: int = Field(0, ge=0, description="Sample index mixed into the seed.")
    nodes: Optional[List[str]] = Field(None, description="Vandermonde nodes as integers or fractions.")
    index_set: Optional[List[int]] = None
    entry_bound: int = Field(3, ge=1)
    r: float = Field(0.1, gt=0)

    @field_validator("nodes", mode="before")
    def _check_nodes(cls, value: Optional[List[object]]) -> Optional[List[str]]:
        if value is None:
            return value
        try:
            parsed = [ScalarMode.exact().coerce(str(node)) for node in value]
            _check_increasing_positive(parsed)
        except GrassmannError as exc:
            raise ValueError(str(exc)) from exc
        return [str(node) for node in parsed]

    @model_validator(mode="after")
    def _check_dimensions(self) -> "SamplerSpec":
        if self.kind in (SamplerKind.COORDINATE, SamplerKind.FLOWED_COORDINATE) and self.index_set is None:
            raise ValueError(f"{self.kind.value} sampler needs index_set")
        if self.index_set is not None:
            IndexSet.of(self.index_set, self.N)
        Ambient(self.N, self.dimension)
        return self

    @property
    def dimension(self) -> int:
        if self.nodes is not None:
            return len(self.nodes)
        if self.index_set is not None:
            return len(self.index_set)
        if self.k is None:
            raise ValueError("k is required when neither nodes nor index_set is given")
        return self.k


def sample_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for sample ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _check_increasing_positive(nodes: Sequence[Fraction]) -> None:
    if not nodes:
        raise InvalidArgumentsError("at least one node is required")
    if nodes[0] <= 0 or any(a >= b for a, b in zip(nodes, nodes[1:])):
        raise InvalidArgumentsError(f"nodes must be positive and strictly increasing: {[str(t) for t in nodes]}")


def random_nodes(k: int, rng: np.random.Generator) -> List[Fraction]:
    """k distinct positive rationals with a shared small denominator, increasing."""
    numerators = np.sort(rng.choice(np.arange(1, k + 4), size=k, replace=False))
    denominator = int(rng.integers(1, 4))
    return [Fraction(int(a), denominator) for a in numerators]


def vandermonde_subspace(nodes: Sequence[object], N: int) -> Subspace:
    """Row i is (1, t_i, t_i², …, t_i^(N−1)); every maximal minor is positive."""
    exact = ScalarMode.exact()
    t = [exact.coerce(node) for node in nodes]
    _check_increasing_positive(t)
    Ambient(N, len(t))
    E = Subspace([[ti**j for j in range(N)] for ti in t], exact)
    if not sign_classify(plucker_vector(E)).positive:
        raise CertificationError(f"Vandermonde subspace on nodes {[str(x) for x in t]} is not positive")
    return E


def coordinate_subspace(index_set: IndexSet, N: int, mode: Optional[ScalarMode] = None) -> Subspace:
    """V_I spanned by e_i, i ∈ I."""
    mode = mode or ScalarMode.exact()
    return Subspace(coordinate_rows(index_set, N, mode), mode)


def random_rational_subspace(N: int, k: int, entry_bound: int = 3, seed: int = 0, index: int = 0) -> Subspace:
    """Integer entries uniform in [−entry_bound, entry_bound], redrawn until the rank is k."""
    if entry_bound < 1:
        raise InvalidArgumentsError(f"entry_bound must be at least 1, got {entry_bound}")
    Ambient(N, k)
    exact = ScalarMode.exact()
    rng = sample_rng(seed, index)
    for _ in range(MAX_RANK_RETRIES):
        rows = as_matrix(rng.integers(-entry_bound, entry_bound, size=(k, N), endpoint=True).tolist(), exact)
        if rank(rows, exact) == k:
            return Subspace(rows, exact)
    raise GenerationFailureError(f"no rank-{k} matrix in {MAX_RANK_RETRIES} draws")


def flowed_coordinate_subspace(index_set: IndexSet, N: int, r: float) -> Subspace:
    """g_r V_I, classified with a strict sign test since its smallest minors vanish to high order in r."""
    if not r > 0:
        raise InvalidArgumentsError(f"r must be positive, got {r}")
    flowed = apply_flow(coordinate_subspace(index_set, N, ScalarMode.floating(0.0)), r)
    if not sign_classify(plucker_vector(flowed)).positive:
        raise CertificationError(f"g_{r:g} applied to V_{index_set} is not positive")
    return flowed


def mixed_sign_subspace(N: int, k: int, seed: int = 0, entry_bound: int = 3, index: int = 0) -> Subspace:
    """A random subspace with all Plücker coordinates nonzero and of both signs."""
    Ambient(N, k)
    exact = ScalarMode.exact()
    rng = sample_rng(seed, index)
    for attempt in range(MAX_MIXED_RETRIES):
        rows = as_matrix(rng.integers(-entry_bound, entry_bound, size=(k, N), endpoint=True).tolist(), exact)
        if rank(rows, exact) != k:
            continue
        E = Subspace(rows, exact)
        signs = sign_classify(plucker_vector(E))
        if signs.all_nonzero and not signs.positive:
            if not classify(E).generic:
                raise CertificationError("mixed-sign sample with nonzero coordinates is not generic")
            logger.debug("mixed-sign sample found after %d draws", attempt + 1)
            return E
    raise GenerationFailureError(f"no mixed-sign subspace in {MAX_MIXED_RETRIES} draws")


def generate(spec: SamplerSpec) -> Subspace:
    """Build the subspace a :class:`SamplerSpec` describes."""
    if spec.kind is SamplerKind.VANDERMONDE:
        nodes = spec.nodes if spec.nodes is not None else random_nodes(spec.dimension, sample_rng(spec.seed, spec.index))
        return vandermonde_subspace(nodes, spec.N)
    if spec.kind is SamplerKind.COORDINATE:
        return coordinate_subspace(IndexSet.of(spec.index_set or (), spec.N), spec.N)
    if spec.kind is SamplerKind.FLOWED_COORDINATE:
        return flowed_coordinate_subspace(IndexSet.of(spec.index_set or (), spec.N), spec.N, spec.r)
    if spec.kind is SamplerKind.RANDOM_RATIONAL:
        return random_rational_subspace(spec.N, spec.dimension, spec.entry_bound, spec.seed, spec.index)
    return mixed_sign_subspace(spec.N, spec.dimension, spec.seed, spec.entry_bound, spec.index)
