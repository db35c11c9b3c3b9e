"""Domain models for the Grassmannian toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvalidArgumentsError, InvalidStateError
from .linalg import Scalar, ScalarMode, as_matrix, infer_mode, rank
from .utils import format_scalar, json_scalar, matrix_strings


@dataclass(frozen=True)
class Ambient:
    """The pair (N, k): dimension of V and of the subspaces considered."""

    N: int
    k: int

    def __post_init__(self) -> None:
        if self.N < 2:
            raise InvalidArgumentsError(f"N must be at least 2, got {self.N}")
        if not 1 <= self.k <= self.N - 1:
            raise InvalidArgumentsError(f"k must lie in [1, {self.N - 1}], got {self.k}")

    @property
    def plucker_length(self) -> int:
        return comb(self.N, self.k)


@dataclass(frozen=True, order=True)
class IndexSet:
    """A strictly increasing set of 1-based indices."""

    elements: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        elements = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", elements)
        if any(x < 1 for x in elements):
            raise InvalidArgumentsError(f"indices must be positive: {elements}")
        if any(a >= b for a, b in zip(elements, elements[1:])):
            raise InvalidArgumentsError(f"indices must be strictly increasing: {elements}")

    @classmethod
    def of(cls, elements: Sequence[int], N: Optional[int] = None) -> "IndexSet":
        index_set = cls(tuple(elements))
        if N is not None:
            index_set.check_within(N)
        return index_set

    @classmethod
    def interval(cls, a: int, b: int) -> "IndexSet":
        """The integer interval [a, b]; empty when a > b."""
        return cls(tuple(range(a, b + 1)))

    @staticmethod
    @lru_cache(maxsize=None)
    def all_of_size(N: int, k: int) -> Tuple["IndexSet", ...]:
        return tuple(IndexSet(c) for c in combinations(range(1, N + 1), k))

    def check_within(self, N: int) -> None:
        if self.elements and self.elements[-1] > N:
            raise InvalidArgumentsError(f"index set {self.label} exceeds [1, {N}]")

    def complement(self, N: int) -> "IndexSet":
        self.check_within(N)
        return IndexSet(tuple(i for i in range(1, N + 1) if i not in self.elements))

    @property
    def columns(self) -> Tuple[int, ...]:
        """Zero-based positions."""
        return tuple(x - 1 for x in self.elements)

    @property
    def label(self) -> str:
        if any(x > 9 for x in self.elements):
            return ",".join(str(x) for x in self.elements)
        return "".join(str(x) for x in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, item: object) -> bool:
        return item in self.elements

    def __str__(self) -> str:
        return "{" + ",".join(str(x) for x in self.elements) + "}"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row space of a full-rank k×N generator matrix."""

    rows: np.ndarray
    mode: ScalarMode = field(default_factory=ScalarMode.exact)
    ambient: Ambient = field(init=False)

    def __post_init__(self) -> None:
        rows = as_matrix(self.rows, self.mode)
        k, N = rows.shape
        ambient = Ambient(N, k)
        if rank(rows, self.mode) != k:
            raise InvalidArgumentsError(f"generator matrix of shape {k}x{N} is rank-deficient")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ambient", ambient)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], mode: Optional[ScalarMode] = None) -> "Subspace":
        """Build a subspace, inferring the scalar mode from the entries when not given."""
        if mode is None:
            mode = infer_mode(x for row in rows for x in row)
        return cls(rows, mode)  # type: ignore[arg-type]

    @property
    def N(self) -> int:
        return self.ambient.N

    @property
    def k(self) -> int:
        return self.ambient.k

    def to_float(self, tolerance: Optional[float] = None) -> "Subspace":
        if not self.mode.is_exact and tolerance is None:
            return self
        tol = self.mode.tolerance if tolerance is None else tolerance
        return Subspace(np.array(self.rows, dtype=float), ScalarMode.floating(tol))

    def summary(self) -> Dict[str, Any]:
        return {"N": self.N, "k": self.k, "mode": self.mode.kind.value, "rows": matrix_strings(self.rows)}


@dataclass(frozen=True)
class PluckerVector:
    """Coordinates of the k-th exterior power of a subspace, in lexicographic order of index sets."""

    ambient: Ambient
    coords: Tuple[Scalar, ...]
    mode: ScalarMode = field(default_factory=ScalarMode.exact)

    def __post_init__(self) -> None:
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.ambient.plucker_length:
            raise InvalidArgumentsError(
                f"expected {self.ambient.plucker_length} coordinates, got {len(coords)}"
            )
        if all(c == 0 for c in coords):
            raise InvalidStateError("Plücker vector with all coordinates zero")

    @property
    def index_sets(self) -> Tuple[IndexSet, ...]:
        return IndexSet.all_of_size(self.ambient.N, self.ambient.k)

    @property
    def scale(self) -> float:
        return float(max(abs(c) for c in self.coords))

    def is_zero_at(self, index_set: IndexSet) -> bool:
        return self.mode.is_zero(self.coordinate(index_set), self.scale)

    def coordinate(self, index_set: IndexSet) -> Scalar:
        return self.coords[self.index_sets.index(index_set)]

    def negated(self) -> "PluckerVector":
        return PluckerVector(self.ambient, tuple(-c for c in self.coords), self.mode)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])

    def labelled(self) -> List[Tuple[str, Scalar]]:
        return list(zip((s.label for s in self.index_sets), self.coords))

    def render(self) -> str:
        return " ".join(f"{label}:{format_scalar(value)}" for label, value in self.labelled())

    def to_record(self) -> Dict[str, Any]:
        return {label: json_scalar(value) for label, value in self.labelled()}

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        return ("index_set", "coordinate"), [(label, format_scalar(value)) for label, value in self.labelled()]


@dataclass(frozen=True)
class SignPattern:
    """Sign summary of a sign-normalized Plücker vector."""

    positive: bool
    nonnegative: bool
    all_nonzero: bool
    margin: float
    witness: Optional[IndexSet] = None


@dataclass(frozen=True)
class Classification:
    """Membership of a subspace in the positive, nonnegative, all-nonzero and generic loci."""

    positive: bool
    nonnegative: bool
    all_nonzero: bool
    generic: bool
    failed_condition: Optional[str] = None
    witness: Optional[IndexSet] = None
    margin: Optional[float] = None

    def to_record(self) -> Dict[str, Any]:
        return {
            "positive": self.positive,
            "nonnegative": self.nonnegative,
            "all_nonzero": self.all_nonzero,
            "generic": self.generic,
            "failed_condition": self.failed_condition,
            "witness": self.witness.label if self.witness is not None else None,
            "margin": self.margin,
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        record = self.to_record()
        return tuple(record), [tuple(record.values())]


@dataclass(frozen=True)
class FlagPair:
    """The chains E_1 ⊂ … ⊂ E_{N-1} and E'_1 ⊂ … ⊂ E'_{N-1} attached to a subspace."""

    e_chain: Tuple[Subspace, ...]
    e_prime_chain: Tuple[Subspace, ...]

    def e(self, i: int) -> Subspace:
        return self.e_chain[i - 1]

    def e_prime(self, i: int) -> Subspace:
        return self.e_prime_chain[i - 1]


@dataclass(frozen=True, eq=False)
class PathOperator:
    """Adjacency matrix of the path graph on N vertices."""

    N: int
    matrix: np.ndarray


class Eigenpair(NamedTuple):
    value: float
    vector: np.ndarray


class PerronLine(NamedTuple):
    vector: np.ndarray
    eigenvalue: float
    iterations: int


@dataclass(frozen=True)
class TotalPositivityResult:
    holds: bool
    min_minor: Scalar
    rows: IndexSet
    columns: IndexSet


@dataclass(frozen=True, eq=False)
class PerronData:
    """The Perron line of the compound of g_1 and the g_1-fixed subspace spanning it."""

    N: int
    k: int
    perron_vector: PluckerVector
    fixed_subspace: Subspace
    gap_ratio: float
    dominant_eigenvalue: float

    def to_record(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "k": self.k,
            "gap_ratio": self.gap_ratio,
            "dominant_eigenvalue": self.dominant_eigenvalue,
            "perron_vector": self.perron_vector.to_record(),
            "fixed_subspace": matrix_strings(self.fixed_subspace.rows),
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        return ("index_set", "perron_coordinate"), [(label, value) for label, value in self.perron_vector.labelled()]


# Reports ---------------------------------------------------------------


@dataclass(frozen=True)
class FlowStep:
    n: int
    distance: float
    min_margin: float
    sign_ok: bool

    def to_record(self) -> Dict[str, Any]:
        return {"n": self.n, "distance": self.distance, "min_margin": self.min_margin, "sign_ok": self.sign_ok}


@dataclass(frozen=True)
class FlowTrace:
    """Sampled trajectory n ↦ g_n E toward the fixed subspace."""

    steps: Tuple[FlowStep, ...]
    converged_at: Optional[int]
    rate_estimate: float
    gap_ratio: float

    CSV_HEADER = ("n", "distance", "min_margin", "sign_ok")

    @property
    def distances(self) -> List[float]:
        return [step.distance for step in self.steps]

    def monotone_tail(self, slack: float = 1e-15) -> bool:
        """Whether distances are nonincreasing over the last half of the trace."""
        tail = self.distances[len(self.steps) // 2 :]
        return all(b <= a + slack for a, b in zip(tail, tail[1:]))

    def to_record(self) -> Dict[str, Any]:
        return {
            "converged_at": self.converged_at,
            "rate_estimate": self.rate_estimate,
            "gap_ratio": self.gap_ratio,
            "steps": [step.to_record() for step in self.steps],
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        return self.CSV_HEADER, [(s.n, s.distance, s.min_margin, s.sign_ok) for s in self.steps]


@dataclass(frozen=True)
class PathPoint:
    r: float
    all_nonzero: bool
    min_margin: float

    def to_record(self) -> Dict[str, Any]:
        return {"r": self.r, "all_nonzero": self.all_nonzero, "min_margin": self.min_margin}


@dataclass(frozen=True)
class TheoremCertificate:
    """Numerical evidence that a positive-coordinate subspace flows inside one component."""

    input_summary: Dict[str, Any]
    classification: Classification
    trace: FlowTrace
    n0: int
    path_check: Tuple[PathPoint, ...]
    passed: bool
    reason: str

    def to_record(self) -> Dict[str, Any]:
        return {
            "input": self.input_summary,
            "classification": self.classification.to_record(),
            "trace": self.trace.to_record(),
            "n0": self.n0,
            "path_check": [point.to_record() for point in self.path_check],
            "verdict": {"status": "pass" if self.passed else "fail", "reason": self.reason},
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        return self.trace.csv_rows()


@dataclass(frozen=True)
class ClosureItem:
    r: float
    positive: bool
    margin: float
    distance: float
    passed: bool

    def to_record(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "positive": self.positive,
            "margin": self.margin,
            "distance": self.distance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ClosureReport:
    """Flowed images of a coordinate subspace approaching it as r decreases."""

    N: int
    index_set: IndexSet
    items: Tuple[ClosureItem, ...]
    passed: bool
    reason: str

    CSV_HEADER = ("r", "positive", "margin", "distance", "passed")

    def to_record(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "index_set": self.index_set.label,
            "items": [item.to_record() for item in self.items],
            "verdict": {"status": "pass" if self.passed else "fail", "reason": self.reason},
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        rows = [(i.r, i.positive, i.margin, i.distance, i.passed) for i in self.items]
        return self.CSV_HEADER, rows


@dataclass(frozen=True)
class SuiteFailure:
    index: int
    kind: str
    check: str
    detail: str
    witness: Optional[str] = None

    def to_record(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "kind": self.kind,
            "check": self.check,
            "detail": self.detail,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class SampleOutcome:
    index: int
    kind: str
    rows: Tuple[Tuple[str, ...], ...]
    classification: Optional[Classification]
    failures: Tuple[SuiteFailure, ...] = ()
    checks: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SuiteReport:
    """Per-sample classifications of a mixed battery and the implications checked on them."""

    N: int
    k: int
    seed: int
    samples: Tuple[SampleOutcome, ...]
    counts: Dict[str, int]
    failures: Tuple[SuiteFailure, ...]

    CSV_HEADER = (
        "index",
        "kind",
        "positive",
        "nonnegative",
        "all_nonzero",
        "generic",
        "failed_condition",
        "witness",
        "margin",
        "failures",
    )

    @property
    def passed(self) -> bool:
        return not self.failures

    def kind_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for sample in self.samples:
            counts[sample.kind] = counts.get(sample.kind, 0) + 1
        return dict(sorted(counts.items()))

    def gr_prime_fraction(self, kind: str = "random_rational") -> Optional[float]:
        """Observed share of samples of ``kind`` with all Plücker coordinates nonzero."""
        chosen = [s for s in self.samples if s.kind == kind and s.classification is not None]
        if not chosen:
            return None
        return sum(s.classification.all_nonzero for s in chosen) / len(chosen)  # type: ignore[union-attr]

    def to_record(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "k": self.k,
            "seed": self.seed,
            "num_samples": len(self.samples),
            "kinds": self.kind_counts(),
            "counts": dict(sorted(self.counts.items())),
            "gr_prime_fraction": self.gr_prime_fraction(),
            "samples": [
                {
                    "index": s.index,
                    "kind": s.kind,
                    "rows": [list(row) for row in s.rows],
                    "classification": s.classification.to_record() if s.classification else None,
                }
                for s in self.samples
            ],
            "failures": [failure.to_record() for failure in self.failures],
            "verdict": {"status": "pass" if self.passed else "fail"},
        }

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]:
        rows = []
        for s in self.samples:
            record = s.classification.to_record() if s.classification else {}
            rows.append(
                (
                    s.index,
                    s.kind,
                    record.get("positive"),
                    record.get("nonnegative"),
                    record.get("all_nonzero"),
                    record.get("generic"),
                    record.get("failed_condition"),
                    record.get("witness"),
                    record.get("margin"),
                    len(s.failures),
                )
            )
        return self.CSV_HEADER, rows
