"""Pydantic schemas for the web API layer."""

from __future__ import annotations

from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator

from tpgrass.linalg import Mode
from tpgrass.models import PluckerVector

Entry = Union[int, float, str]


class MatrixRequest(BaseModel):
    rows: List[List[Entry]] = Field(..., min_length=1, description="Generator rows of the subspace.")
    mode: Optional[Mode] = Field(None, description="Scalar mode; inferred from the entries when omitted.")

    @field_validator("rows")
    def _rectangular(cls, value: List[List[Entry]]) -> List[List[Entry]]:
        if any(len(row) != len(value[0]) for row in value) or not value[0]:
            raise ValueError("rows must be nonempty and of equal length")
        return value


class VerifyRequest(MatrixRequest):
    r_step: Optional[float] = Field(None, gt=0)
    epsilon: Optional[float] = Field(None, gt=0)
    n_max: Optional[int] = Field(None, ge=1)


class ClosureRequest(BaseModel):
    n: int = Field(..., ge=2)
    index_set: List[int] = Field(..., min_length=1)
    r_list: List[float] = Field(default_factory=lambda: [1.0, 0.1, 0.01], min_length=1)


class PluckerResponse(BaseModel):
    N: int
    k: int
    mode: Mode
    coordinates: Dict[str, Union[str, float]]
    rendered: str

    @classmethod
    def from_vector(cls, vector: PluckerVector) -> "PluckerResponse":
        return cls(
            N=vector.ambient.N,
            k=vector.ambient.k,
            mode=vector.mode.kind,
            coordinates=vector.to_record(),
            rendered=vector.render(),
        )


class ClassificationResponse(BaseModel):
    positive: bool
    nonnegative: bool
    all_nonzero: bool
    generic: bool
    failed_condition: Optional[str] = None
    witness: Optional[str] = None
    margin: Optional[float] = None
