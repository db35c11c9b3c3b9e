"""Factory for the FastAPI application."""

from __future__ import annotations

from typing import Any, Dict

from fastapi import APIRouter, Depends, FastAPI, HTTPException, status

from tpgrass.config import ToolConfig
from tpgrass.exceptions import (
    CertificationError,
    ConvergenceFailureError,
    GrassmannError,
    HypothesisNotMetError,
    InvalidArgumentsError,
    ModeMismatchError,
)
from tpgrass.services import GrassmannService

from .schemas import ClassificationResponse, ClosureRequest, MatrixRequest, PluckerResponse, VerifyRequest


def _http_error(exc: GrassmannError) -> HTTPException:
    if isinstance(exc, HypothesisNotMetError):
        code = status.HTTP_409_CONFLICT
    elif isinstance(exc, (CertificationError, ConvergenceFailureError)):
        code = status.HTTP_500_INTERNAL_SERVER_ERROR
    elif isinstance(exc, (InvalidArgumentsError, ModeMismatchError)):
        code = status.HTTP_422_UNPROCESSABLE_ENTITY
    else:
        code = status.HTTP_400_BAD_REQUEST
    return HTTPException(status_code=code, detail=str(exc))


def create_app(config: ToolConfig | None = None, service: GrassmannService | None = None) -> FastAPI:
    """Create and configure the FastAPI app."""
    app = FastAPI(title="Totally Positive Grassmannian API", version="0.1.0")
    app.state.service = service or GrassmannService(config=config)

    def get_service() -> GrassmannService:
        return app.state.service

    router = APIRouter()

    @router.get("/health", tags=["meta"])
    def health_check() -> dict[str, str]:
        return {"status": "ok"}

    @router.post("/plucker", response_model=PluckerResponse, tags=["exterior"])
    def plucker(payload: MatrixRequest, svc: GrassmannService = Depends(get_service)) -> PluckerResponse:
        try:
            vector = svc.plucker(svc.subspace_from_rows(payload.rows, payload.mode))
        except GrassmannError as exc:
            raise _http_error(exc) from exc
        return PluckerResponse.from_vector(vector)

    @router.post("/classify", response_model=ClassificationResponse, tags=["membership"])
    def classify(payload: MatrixRequest, svc: GrassmannService = Depends(get_service)) -> ClassificationResponse:
        try:
            classification = svc.classify(svc.subspace_from_rows(payload.rows, payload.mode))
        except GrassmannError as exc:
            raise _http_error(exc) from exc
        return ClassificationResponse(**classification.to_record())

    @router.get("/perron/{n}/{k}", tags=["flow"])
    def perron(n: int, k: int, svc: GrassmannService = Depends(get_service)) -> Dict[str, Any]:
        try:
            return svc.perron(n, k).to_record()
        except GrassmannError as exc:
            raise _http_error(exc) from exc

    @router.post("/verify", tags=["verify"])
    def verify(payload: VerifyRequest, svc: GrassmannService = Depends(get_service)) -> Dict[str, Any]:
        try:
            E = svc.subspace_from_rows(payload.rows, payload.mode)
            cfg = svc.flow_config(r_step=payload.r_step, epsilon=payload.epsilon, n_max=payload.n_max)
            return svc.verify(E, cfg).to_record()
        except GrassmannError as exc:
            raise _http_error(exc) from exc

    @router.post("/closure", tags=["verify"])
    def closure(payload: ClosureRequest, svc: GrassmannService = Depends(get_service)) -> Dict[str, Any]:
        try:
            return svc.closure(payload.index_set, payload.n, payload.r_list).to_record()
        except GrassmannError as exc:
            raise _http_error(exc) from exc

    app.include_router(router)
    return app
