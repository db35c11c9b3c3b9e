"""Service layer shared by the command line and the HTTP API."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

from .config import FlowConfig, ToolConfig
from .exceptions import ModeMismatchError
from .exterior import plucker_vector
from .flow import fixed_subspace_E1, flow_iterate
from .linalg import Mode, ScalarMode, infer_mode
from .membership import classify
from .models import (
    Classification,
    ClosureReport,
    FlowTrace,
    IndexSet,
    PerronData,
    PluckerVector,
    Subspace,
    SuiteReport,
    TheoremCertificate,
)
from .samplers import SamplerSpec, generate
from .storage import ReportLike, read_subspace, write_report
from .verify import run_inclusion_suite, verify_closure, verify_theorem

logger = logging.getLogger(__name__)


class GrassmannService:
    """Binds a :class:`ToolConfig` to the library operations."""

    def __init__(self, config: Optional[ToolConfig] = None) -> None:
        self.config = config or ToolConfig.default()

    # Inputs -------------------------------------------------------------

    def scalar_mode(self, mode: Union[Mode, str, None]) -> Optional[ScalarMode]:
        if mode is None:
            return None
        if Mode(mode) is Mode.EXACT:
            return ScalarMode.exact()
        return ScalarMode.floating(self.config.tolerance)

    def load_subspace(self, path: Union[str, Path], mode: Union[Mode, str, None] = None) -> Subspace:
        """Read a matrix file; decimals select floating mode unless ``mode`` says otherwise."""
        return read_subspace(path, mode, self.config.tolerance)

    def subspace_from_rows(self, rows: Sequence[Sequence[object]], mode: Union[Mode, str, None] = None) -> Subspace:
        """Build a subspace from entries given as numbers or strings like ``"3/2"``."""
        scalar_mode = self.scalar_mode(mode)
        if scalar_mode is None:
            scalar_mode = infer_mode((x for row in rows for x in row), self.config.tolerance)
        return Subspace(rows, scalar_mode)  # type: ignore[arg-type]

    def flow_config(self, **overrides: object) -> FlowConfig:
        values = {key: value for key, value in overrides.items() if value is not None}
        values.setdefault("tolerance", self.config.tolerance)
        return FlowConfig(**values)  # type: ignore[arg-type]

    # Operations ---------------------------------------------------------

    def plucker(self, E: Subspace) -> PluckerVector:
        return plucker_vector(E)

    def classify(self, E: Subspace) -> Classification:
        return classify(E)

    def perron(self, N: int, k: int) -> PerronData:
        return fixed_subspace_E1(N, k)

    def flow(self, E: Subspace, cfg: Optional[FlowConfig] = None) -> FlowTrace:
        cfg = cfg or self.flow_config()
        if E.mode.is_exact:
            raise ModeMismatchError("flow requires floating mode")
        return flow_iterate(E, cfg)

    def verify(self, E: Subspace, cfg: Optional[FlowConfig] = None) -> TheoremCertificate:
        return verify_theorem(E, cfg or self.flow_config())

    def closure(self, index_set: Sequence[int], N: int, r_list: Sequence[float]) -> ClosureReport:
        return verify_closure(IndexSet.of(index_set, N), N, r_list)

    def suite(self, N: int, k: int, num_samples: int, seed: int, jobs: Optional[int] = None) -> SuiteReport:
        return run_inclusion_suite(N, k, num_samples, seed, jobs or self.config.jobs)

    def sample(self, spec: SamplerSpec) -> Subspace:
        return generate(spec)

    # Output -------------------------------------------------------------

    def output_path(self, command: str, extension: str, explicit: Optional[str] = None) -> Optional[Path]:
        """Explicit path, else ``<output_dir>/<command>.<extension>``, else None for stdout."""
        if explicit:
            return None if explicit == "-" else Path(explicit)
        if self.config.output_dir is not None:
            return self.config.output_dir / f"{command}.{extension}"
        return None

    def emit(self, report: ReportLike, fmt: str, destination: Optional[Path]) -> str:
        logger.debug("writing %s report to %s", fmt, destination or "stdout")
        return write_report(report, fmt, destination)
