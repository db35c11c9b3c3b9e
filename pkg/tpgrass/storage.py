"""Persistence layer: matrix text files and report serialization."""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOLERANCE
from .exceptions import MatrixParseError, ReportIOError
from .linalg import Mode, ScalarMode, as_matrix
from .models import Subspace
from .utils import format_scalar

_INTEGER = re.compile(r"[+-]?\d+")
_FRACTION = re.compile(r"[+-]?\d+/\d+")
_DECIMAL = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_TOKEN = re.compile(r"\S+")

FORMATS = ("json", "csv")


class ReportLike(Protocol):
    def to_record(self) -> Dict[str, Any]: ...

    def csv_rows(self) -> Tuple[Sequence[str], List[Sequence[Any]]]: ...


# Matrix text --------------------------------------------------------------


def _classify_token(token: str, line: int, column: int) -> Tuple[str, bool]:
    if _INTEGER.fullmatch(token):
        return token, False
    if _FRACTION.fullmatch(token):
        if int(token.split("/")[1]) == 0:
            raise MatrixParseError(f"zero denominator in {token!r}", line, column)
        return token, False
    if _DECIMAL.fullmatch(token):
        return token, True
    raise MatrixParseError(f"malformed entry {token!r}", line, column)


def parse_matrix(
    text: str, mode: Union[Mode, str, None] = None, tolerance: float = DEFAULT_TOLERANCE
) -> Tuple[np.ndarray, ScalarMode]:
    """Parse one row per line of integers, fractions ``a/b`` or decimals.

    Blank lines and lines starting with ``#`` are skipped. Decimals switch the matrix to
    floating mode unless ``mode`` is exact, in which case they are rejected.
    """
    requested = Mode(mode) if mode is not None else None
    rows: List[List[str]] = []
    first_decimal: Optional[Tuple[int, int]] = None
    width: Optional[int] = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        row = []
        for match in _TOKEN.finditer(line):
            token, is_decimal = _classify_token(match.group(), line_no, match.start() + 1)
            if is_decimal and first_decimal is None:
                first_decimal = (line_no, match.start() + 1)
            row.append(token)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixParseError(f"expected {width} entries, found {len(row)}", line_no, 1)
        rows.append(row)
    if not rows:
        raise MatrixParseError("no matrix rows found", 1, 1)

    if requested is Mode.EXACT and first_decimal is not None:
        raise MatrixParseError("decimal entries are not allowed in exact mode", *first_decimal)
    if requested is Mode.FLOAT or (requested is None and first_decimal is not None):
        scalar_mode = ScalarMode.floating(tolerance)
    else:
        scalar_mode = ScalarMode.exact()
    return as_matrix(rows, scalar_mode), scalar_mode


def read_subspace(
    path: Union[str, Path], mode: Union[Mode, str, None] = None, tolerance: float = DEFAULT_TOLERANCE
) -> Subspace:
    """Load a generator matrix file as a :class:`Subspace` (rank is checked on construction)."""
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Matrix file {source} does not exist.")
    matrix, scalar_mode = parse_matrix(source.read_text(encoding="utf-8"), mode, tolerance)
    return Subspace(matrix, scalar_mode)


def format_matrix(matrix: np.ndarray) -> str:
    return "\n".join(" ".join(format_scalar(x) for x in row) for row in matrix) + "\n"


# Reports ------------------------------------------------------------------


def _csv_cell(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    return value


def render_report(report: ReportLike, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        header, rows = report.csv_rows()
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_csv_cell(cell) for cell in row] for row in rows)
        return buffer.getvalue()
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def write_report(report: ReportLike, fmt: str = "json", destination: Union[str, Path, None] = None) -> str:
    """Write the rendered report to ``destination``, or stdout for None and ``"-"``."""
    text = render_report(report, fmt)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        return text
    target = Path(destination)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {target}: {exc}") from exc
    return text
