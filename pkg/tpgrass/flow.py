"""The path operator A, the flow g_r = exp(rA) and convergence toward its fixed subspace."""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCE, FlowConfig
from .exceptions import (
    BoundaryContactError,
    CertificationError,
    ConvergenceFailureError,
    InvalidArgumentsError,
    ModeMismatchError,
    PreconditionViolationError,
    SizeLimitError,
)
from .exterior import compound_matrix, enumerate_index_sets, normalize_sign, plucker_vector
from .linalg import ScalarMode, mode_of, orthonormal_rows
from .membership import sign_classify
from .models import (
    Ambient,
    Eigenpair,
    FlowStep,
    FlowTrace,
    PathOperator,
    PerronData,
    PerronLine,
    PluckerVector,
    Subspace,
    TotalPositivityResult,
)
from .utils import geometric_mean_ratio

logger = logging.getLogger(__name__)

MAX_TP_SIZE = 8
TP_FLOOR = 1e-12
PERRON_TOLERANCE = 1e-13
RATE_WINDOW = 5

# Taylor degree and scaling threshold for exp(X): with ‖X‖₁ ≤ θ the remainder of the
# degree-16 series is below θ¹⁷/17! · 1/(1 − θ/18) ≈ 2e-20.
_TAYLOR_DEGREE = 16
_SCALING_THRESHOLD = 0.5


def matrix_A(N: int) -> PathOperator:
    """Adjacency matrix of the path on N vertices: A e_i = e_{i-1} + e_{i+1}."""
    if N < 2:
        raise InvalidArgumentsError(f"N must be at least 2, got {N}")
    matrix = np.zeros((N, N))
    idx = np.arange(N - 1)
    matrix[idx, idx + 1] = 1.0
    matrix[idx + 1, idx] = 1.0
    matrix.setflags(write=False)
    return PathOperator(N, matrix)


def eigensystem_A(N: int) -> List[Eigenpair]:
    """Closed-form spectrum λ_j = 2cos(jπ/(N+1)), v_j(i) = sin(ijπ/(N+1)), decreasing in j."""
    A = matrix_A(N).matrix
    i = np.arange(1, N + 1)
    pairs = []
    for j in range(1, N + 1):
        value = 2.0 * math.cos(j * math.pi / (N + 1))
        vector = np.sin(i * j * math.pi / (N + 1))
        residual = np.linalg.norm(A @ vector - value * vector)
        if residual > 1e-12 * np.linalg.norm(vector):
            raise CertificationError(f"eigenpair j={j} of the path operator has residual {residual:.3e}")
        vector.setflags(write=False)
        pairs.append(Eigenpair(value, vector))
    return pairs


@lru_cache(maxsize=256)
def exp_rA(N: int, r: float) -> np.ndarray:
    """exp(rA) by scaling and squaring a truncated Taylor series.

    The result is cached and returned read-only.
    """
    if r < 0:
        raise InvalidArgumentsError(f"r must be nonnegative, got {r}")
    X = r * np.asarray(matrix_A(N).matrix)
    norm = float(np.linalg.norm(X, 1))
    squarings = max(0, math.ceil(math.log2(norm / _SCALING_THRESHOLD))) if norm > 0 else 0
    X = X / 2.0**squarings
    identity = np.eye(N)
    result = identity
    for j in range(_TAYLOR_DEGREE, 0, -1):
        result = identity + (X @ result) / j
    for _ in range(squarings):
        result = result @ result
    result = (result + result.T) / 2.0
    result.setflags(write=False)
    logger.debug("exp(rA) for N=%d, r=%g with %d squarings", N, r, squarings)
    return result


def is_totally_positive(M: np.ndarray, strict: bool = True, floor: float = TP_FLOOR) -> TotalPositivityResult:
    """Enumerate every minor of every order and compare the smallest against zero.

    Floating matrices use an absolute ``floor``: strict positivity means every minor exceeds
    it, nonnegativity that none falls below ``-floor``.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentsError(f"expected a square matrix, got shape {M.shape}")
    N = M.shape[0]
    if N > MAX_TP_SIZE:
        raise SizeLimitError(f"total positivity check is limited to N <= {MAX_TP_SIZE}, got {N}")
    mode = mode_of(M)
    if mode.is_exact:
        M = np.array(M.tolist(), dtype=object)

    smallest = None
    location: Tuple[int, int, int] = (1, 0, 0)
    for order in range(1, N + 1):
        minors = compound_matrix(M, order, mode)
        values = list(minors.flat)
        flat = min(range(len(values)), key=values.__getitem__)
        value = values[flat]
        if smallest is None or value < smallest:
            smallest = value
            location = (order, *divmod(flat, minors.shape[1]))

    order, row, column = location
    sets = enumerate_index_sets(N, order)
    if mode.is_exact:
        holds = smallest > 0 if strict else smallest >= 0
    else:
        holds = smallest > floor if strict else smallest >= -floor
    return TotalPositivityResult(bool(holds), smallest, sets[row], sets[column])


def apply_flow(E: Subspace, r: float) -> Subspace:
    """The subspace g_r E.

    Flows longer than one unit are split into unit steps and a remainder, with the rows
    re-orthonormalized between chunks.
    """
    if E.mode.is_exact:
        raise ModeMismatchError("flow requires floating mode")
    if r < 0:
        raise InvalidArgumentsError(f"r must be nonnegative, got {r}")
    if r == 0:
        return E
    whole, rest = divmod(float(r), 1.0)
    chunks = [1.0] * int(whole) + ([rest] if rest > 0 else [])
    rows = np.asarray(E.rows, dtype=float)
    for position, chunk in enumerate(chunks):
        if position:
            rows = orthonormal_rows(rows)
        rows = rows @ exp_rA(E.N, chunk).T
    return Subspace(rows, E.mode)


def perron_line(C: np.ndarray, max_iterations: Optional[int] = None) -> PerronLine:
    """Power iteration for the positive eigenline of a matrix with positive entries."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidArgumentsError(f"expected a square matrix, got shape {C.shape}")
    if not np.all(C > 0):
        raise InvalidArgumentsError("perron_line needs a matrix with all entries strictly positive")
    budget = max_iterations if max_iterations is not None else 10 * FlowConfig().n_max

    n = C.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    for iteration in range(1, budget + 1):
        y = C @ x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) < PERRON_TOLERANCE:
            eigenvalue = float(y @ C @ y)
            logger.debug("power iteration converged after %d iterations", iteration)
            return PerronLine(y, eigenvalue, iteration)
        x = y
    raise ConvergenceFailureError(f"power iteration did not converge within {budget} iterations")


def plucker_angle(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between the lines spanned by ``u`` and ``v``, in [0, π/2]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    cosine = float(u @ v)
    sine = float(np.linalg.norm(v - cosine * u))
    return math.atan2(sine, abs(cosine))


def grassmann_distance(E: Subspace, F: Subspace) -> float:
    """Angle between the Plücker lines of E and F."""
    if E.ambient != F.ambient:
        raise InvalidArgumentsError(f"subspaces live in different Grassmannians: {E.ambient} vs {F.ambient}")
    return plucker_angle(plucker_vector(E).as_array(), plucker_vector(F).as_array())


@lru_cache(maxsize=None)
def fixed_subspace_E1(N: int, k: int) -> PerronData:
    """The g_1-fixed subspace spanned by the top k eigenvectors of A, checked three ways."""
    ambient = Ambient(N, k)
    pairs = eigensystem_A(N)
    E1 = Subspace(np.array([pair.vector for pair in pairs[:k]]), ScalarMode.floating(DEFAULT_TOLERANCE))

    drift = grassmann_distance(apply_flow(E1, 1.0), E1)
    if drift >= 1e-10:
        raise CertificationError(f"g_1 moves E_1 by {drift:.3e}")

    p = normalize_sign(plucker_vector(E1))
    if not all(c > 0 for c in p.coords):
        raise CertificationError("Plücker vector of E_1 is not strictly positive")

    line = perron_line(compound_matrix(exp_rA(N, 1.0), k, ScalarMode.floating()))
    mismatch = plucker_angle(line.vector, p.as_array())
    if mismatch >= 1e-8:
        raise CertificationError(f"Perron line and Plücker line of E_1 differ by {mismatch:.3e}")

    gap_ratio = math.exp(pairs[k].value - pairs[k - 1].value)
    logger.debug("fixed subspace for N=%d, k=%d: gap ratio %.6f", N, k, gap_ratio)
    return PerronData(
        N=N,
        k=k,
        perron_vector=PluckerVector(ambient, tuple(float(x) for x in line.vector), E1.mode),
        fixed_subspace=E1,
        gap_ratio=gap_ratio,
        dominant_eigenvalue=line.eigenvalue,
    )


def flow_iterate(E: Subspace, cfg: Optional[FlowConfig] = None) -> FlowTrace:
    """Iterate E ← g_1 E until the distance to E_1 drops below ``cfg.epsilon``.

    Every step records the distance, the Plücker margin and whether all coordinates stay
    nonzero; losing a coordinate after the start raises :class:`BoundaryContactError`.
    """
    cfg = cfg or FlowConfig()
    if E.mode.is_exact:
        raise ModeMismatchError("flow requires floating mode")
    mode = ScalarMode.floating(cfg.tolerance)
    current = Subspace(orthonormal_rows(E.rows), mode)
    if not sign_classify(plucker_vector(current)).all_nonzero:
        raise PreconditionViolationError("start of the flow has a vanishing Plücker coordinate", tag="all_nonzero")

    perron = fixed_subspace_E1(E.N, E.k)
    g1 = exp_rA(E.N, 1.0)
    steps: List[FlowStep] = []
    converged_at: Optional[int] = None
    pattern: Optional[Tuple[bool, ...]] = None
    for n in range(cfg.n_max + 1):
        p = plucker_vector(current)
        signs = sign_classify(p)
        if not signs.all_nonzero:
            raise BoundaryContactError(
                f"Plücker margin {signs.margin:.3e} at step {n} is below tolerance {cfg.tolerance:g}", step=n
            )
        # a sign flip between two steps means the path crossed a coordinate hyperplane
        current_pattern = tuple(bool(c > 0) for c in normalize_sign(p).coords)
        if pattern is not None and current_pattern != pattern:
            raise BoundaryContactError(f"Plücker sign pattern changed between steps {n - 1} and {n}", step=n)
        pattern = current_pattern
        distance = grassmann_distance(current, perron.fixed_subspace)
        steps.append(FlowStep(n, distance, signs.margin, signs.all_nonzero))
        if distance < cfg.epsilon:
            converged_at = n
            break
        if n < cfg.n_max:
            current = Subspace(orthonormal_rows(current.rows @ g1.T), mode)

    trace = FlowTrace(
        steps=tuple(steps),
        converged_at=converged_at,
        rate_estimate=geometric_mean_ratio([s.distance for s in steps[-RATE_WINDOW:]]),
        gap_ratio=perron.gap_ratio,
    )
    if not trace.monotone_tail():
        logger.warning("distances are not monotone over the last half of the trace")
    if converged_at is None:
        logger.info("flow did not reach epsilon=%g within %d steps", cfg.epsilon, cfg.n_max)
    return trace
