"""
Reduction endpoints
"""
import logging

from fastapi import APIRouter, HTTPException, Depends, status

from models.schemas import ReductionRequest, Report, ErrorResponse
from services.report_service import ReportService
from api_config.security import verify_api_key
from utils.exceptions import EXIT_INPUT_ERROR

logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/api/v1",
    tags=["reductions"]
)

RESPONSES = {
    200: {"description": "Report produced (reducibility verdicts included)"},
    400: {"model": ErrorResponse, "description": "Invalid input system or options"},
    401: {"model": ErrorResponse, "description": "Invalid or missing API Key"},
}


def _run(command: str, request: ReductionRequest) -> Report:
    result = ReportService().run(command, request)
    report = result.report
    if report.exit_status == EXIT_INPUT_ERROR:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=report.error.model_dump(exclude_none=True)
        )
    return report


def _endpoint(command: str, summary: str):
    async def handler(request: ReductionRequest) -> Report:
        return _run(command, request)

    handler.__name__ = f"{command}_system"
    router.add_api_route(
        f"/{command}",
        handler,
        methods=["POST"],
        response_model=Report,
        response_model_exclude_none=True,
        dependencies=[Depends(verify_api_key)],
        responses=RESPONSES,
        summary=summary,
    )


_endpoint("parse", "Canonical system and its matrices")
_endpoint("classify", "Case label of the system")
_endpoint("conditions", "Uniform-Gamma conditions and verdict")
_endpoint("reduce", "Decouple one variable")
_endpoint("verify", "Reduce and verify numerically")


@router.get(
    "/health",
    tags=["health"],
    summary="Health check",
    description="Check if the API is running and healthy"
)
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "service": "QP Reduction API"}
