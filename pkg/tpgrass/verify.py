"""End-to-end verification pipelines and their reports."""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import FlowConfig
from .exceptions import BoundaryContactError, GrassmannError, HypothesisNotMetError, InvalidArgumentsError
from .exterior import plucker_vector
from .flow import apply_flow, exp_rA, fixed_subspace_E1, flow_iterate, grassmann_distance
from .linalg import ScalarMode, orthonormal_rows
from .membership import classify, in_gr_prime, sign_classify
from .models import (
    Ambient,
    ClosureItem,
    ClosureReport,
    FlowTrace,
    IndexSet,
    PathPoint,
    SampleOutcome,
    SuiteFailure,
    SuiteReport,
    Subspace,
    TheoremCertificate,
)
from .samplers import (
    SamplerKind,
    coordinate_subspace,
    mixed_sign_subspace,
    random_nodes,
    random_rational_subspace,
    sample_rng,
    vandermonde_subspace,
)
from .storage import ReportLike, write_report
from .utils import matrix_strings

logger = logging.getLogger(__name__)

SUITE_KINDS = (
    SamplerKind.VANDERMONDE,
    SamplerKind.RANDOM_RATIONAL,
    SamplerKind.MIXED_SIGN,
    SamplerKind.COORDINATE,
)

CHECK_POSITIVE_ALL_NONZERO = "positive_implies_all_nonzero"
CHECK_ALL_NONZERO_GENERIC = "all_nonzero_implies_generic"
CHECK_DEFINITION_MINOR = "rank_equals_minor_criterion"
CHECK_VANDERMONDE_POSITIVE = "vandermonde_positive"


# Theorem pipeline -------------------------------------------------------


def _grid(end: float, r_step: float) -> List[float]:
    count = int(math.floor(end / r_step + 1e-9))
    grid = [round(i * r_step, 12) for i in range(count + 1)]
    if end - grid[-1] > 1e-12:
        grid.append(float(end))
    return grid


def _path_check(start: Subspace, end: float, cfg: FlowConfig) -> Tuple[Tuple[PathPoint, ...], Optional[float]]:
    """Sample r ↦ g_r E on the grid; stops at the first point with a vanishing coordinate."""
    points: List[PathPoint] = []
    g_step = exp_rA(start.N, cfg.r_step)
    current = start
    previous_r = 0.0
    for r in _grid(end, cfg.r_step):
        if r == 0.0:
            current = start
        elif math.isclose(r - previous_r, cfg.r_step, rel_tol=1e-9):
            current = Subspace(orthonormal_rows(current.rows @ g_step.T), start.mode)
        else:
            current = apply_flow(start, r)
        previous_r = r
        signs = sign_classify(plucker_vector(current))
        points.append(PathPoint(r, signs.all_nonzero, signs.margin))
        if not signs.all_nonzero:
            return tuple(points), r
    return tuple(points), None


def verify_theorem(E: Subspace, cfg: Optional[FlowConfig] = None) -> TheoremCertificate:
    """Flow a positive subspace to E_1 and sample the path r ↦ g_r E for vanishing coordinates."""
    cfg = cfg or FlowConfig()
    classification = classify(E)
    if not classification.positive:
        raise HypothesisNotMetError(
            f"input is not in the positive locus (witness {classification.witness})", tag="positive"
        )
    start = E.to_float(cfg.tolerance)
    start_signs = sign_classify(plucker_vector(start))
    if not start_signs.positive:
        raise HypothesisNotMetError(
            f"start is positive but its Plücker margin {start_signs.margin:.3g} is not above "
            f"tolerance {cfg.tolerance:g} (witness {start_signs.witness})",
            tag="positive",
        )

    try:
        trace = flow_iterate(start, cfg)
    except BoundaryContactError as exc:
        empty = FlowTrace((), None, 0.0, fixed_subspace_E1(E.N, E.k).gap_ratio)
        return TheoremCertificate(E.summary(), classification, empty, 0, (), False, str(exc))

    end = float(trace.converged_at if trace.converged_at is not None else trace.steps[-1].n)
    path, contact = _path_check(start, end, cfg)

    if contact is not None:
        passed, reason = False, f"boundary contact on the path at r={contact:g}"
    elif trace.converged_at is None:
        passed, reason = False, f"no convergence to epsilon={cfg.epsilon:g} within {cfg.n_max} steps"
    else:
        passed = True
        reason = f"converged at step {trace.converged_at}; {len(path)} path points with nonzero coordinates"
    logger.info("theorem certificate for N=%d, k=%d: %s", E.N, E.k, reason)
    return TheoremCertificate(E.summary(), classification, trace, 0, path, passed, reason)


# Closure pipeline -------------------------------------------------------


def verify_closure(index_set: IndexSet, N: int, r_list: Sequence[float]) -> ClosureReport:
    """Check g_r V_I is positive and approaches V_I as r decreases along ``r_list``."""
    r_values = [float(r) for r in r_list]
    if not r_values:
        raise InvalidArgumentsError("r_list must not be empty")
    if any(r <= 0 for r in r_values):
        raise InvalidArgumentsError(f"r_list must be strictly positive, got {r_values}")
    if any(a <= b for a, b in zip(r_values, r_values[1:])):
        raise InvalidArgumentsError(f"r_list must be strictly decreasing, got {r_values}")
    Ambient(N, len(index_set))

    base = coordinate_subspace(IndexSet.of(tuple(index_set), N), N, ScalarMode.floating(0.0))
    items: List[ClosureItem] = []
    previous = math.inf
    for r in r_values:
        flowed = apply_flow(base, r)
        signs = sign_classify(plucker_vector(flowed))
        distance = grassmann_distance(flowed, base)
        items.append(ClosureItem(r, signs.positive, signs.margin, distance, signs.positive and distance < previous))
        previous = distance

    failed = [item for item in items if not item.passed]
    if failed:
        reason = f"{len(failed)} of {len(items)} items failed, first at r={failed[0].r:g}"
    else:
        reason = f"all {len(items)} flowed points positive with decreasing distance"
    return ClosureReport(N, index_set, tuple(items), not failed, reason)


# Inclusion suite --------------------------------------------------------


def _draw(kind: SamplerKind, N: int, k: int, seed: int, index: int) -> Subspace:
    if kind is SamplerKind.VANDERMONDE:
        return vandermonde_subspace(random_nodes(k, sample_rng(seed, index)), N)
    if kind is SamplerKind.RANDOM_RATIONAL:
        return random_rational_subspace(N, k, seed=seed, index=index)
    if kind is SamplerKind.MIXED_SIGN:
        return mixed_sign_subspace(N, k, seed=seed, index=index)
    chosen = np.sort(sample_rng(seed, index).choice(N, size=k, replace=False)) + 1
    return coordinate_subspace(IndexSet(tuple(int(i) for i in chosen)), N)


def evaluate_sample(task: Tuple[int, int, int, int]) -> SampleOutcome:
    """Generate sample ``index`` of the battery and check the inclusions on it."""
    N, k, seed, index = task
    kind = SUITE_KINDS[index % len(SUITE_KINDS)]

    def failure(check: str, detail: str, witness: Optional[str] = None) -> SuiteFailure:
        return SuiteFailure(index, kind.value, check, detail, witness)

    try:
        E = _draw(kind, N, k, seed, index)
    except GrassmannError as exc:
        return SampleOutcome(index, kind.value, (), None, (failure("generation", str(exc)),))
    rows = tuple(tuple(row) for row in matrix_strings(E.rows))

    try:
        classification = classify(E)
        in_prime, witness = in_gr_prime(E)
    except GrassmannError as exc:
        return SampleOutcome(index, kind.value, rows, None, (failure("classification", str(exc)),))

    failures: List[SuiteFailure] = []
    checks = [CHECK_POSITIVE_ALL_NONZERO, CHECK_ALL_NONZERO_GENERIC, CHECK_DEFINITION_MINOR]
    if classification.positive and not classification.all_nonzero:
        failures.append(failure(CHECK_POSITIVE_ALL_NONZERO, "positive sample has a zero coordinate"))
    if classification.all_nonzero and not classification.generic:
        failures.append(
            failure(CHECK_ALL_NONZERO_GENERIC, f"condition {classification.failed_condition} fails")
        )
    if in_prime != classification.all_nonzero:
        failures.append(failure(CHECK_DEFINITION_MINOR, f"rank verdict {in_prime}, minor verdict {not in_prime}"))
    elif witness is not None and not plucker_vector(E).is_zero_at(witness.complement(N)):
        failures.append(
            failure(CHECK_DEFINITION_MINOR, "witness does not pair with a vanishing coordinate", witness.label)
        )
    if kind is SamplerKind.VANDERMONDE:
        checks.append(CHECK_VANDERMONDE_POSITIVE)
        if not classification.positive:
            witness_label = classification.witness.label if classification.witness else None
            failures.append(failure(CHECK_VANDERMONDE_POSITIVE, "Vandermonde sample not positive", witness_label))
    return SampleOutcome(index, kind.value, rows, classification, tuple(failures), tuple(checks))


def run_inclusion_suite(N: int, k: int, num_samples: int, seed: int, jobs: int = 1) -> SuiteReport:
    """Classify a mixed battery and check the inclusions between the loci on every sample.

    Samples are independent; with ``jobs > 1`` they are spread over worker processes and
    reassembled in index order.
    """
    if num_samples < 1:
        raise InvalidArgumentsError(f"num_samples must be at least 1, got {num_samples}")
    if jobs < 1:
        raise InvalidArgumentsError(f"jobs must be at least 1, got {jobs}")
    Ambient(N, k)
    tasks = [(N, k, seed, index) for index in range(num_samples)]
    if jobs == 1:
        outcomes = [evaluate_sample(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(evaluate_sample, tasks, chunksize=max(1, num_samples // (4 * jobs))))

    counts: Counter = Counter()
    failures: List[SuiteFailure] = []
    for outcome in outcomes:
        counts.update(outcome.checks)
        failures.extend(outcome.failures)
    if failures:
        logger.warning("inclusion suite N=%d, k=%d found %d failures", N, k, len(failures))
    return SuiteReport(N, k, seed, tuple(outcomes), dict(counts), tuple(failures))


# Reports ----------------------------------------------------------------


def emit_report(report: ReportLike, fmt: str = "json", destination: Union[str, Path, None] = None) -> str:
    """Serialize ``report`` deterministically to ``destination`` (stdout for None or "-")."""
    return write_report(report, fmt, destination)
