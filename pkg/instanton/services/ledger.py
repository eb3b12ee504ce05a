import json
import logging
from typing import Any, Dict, List, Optional

import psutil
from sqlalchemy import select

from instanton.core.database import get_session
from instanton.models.database_models import RunRecord
from instanton.models.pydantic_models import RunSummary

logger = logging.getLogger(__name__)


def memory_usage_mb() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)


def record_run(command: str, parameters: Dict[str, Any], seed: Optional[int], verdict: str, exit_code: int,
               report: Optional[str], execution_time_ms: int) -> RunSummary:
    """Persist one CLI run"""
    with get_session() as session:
        record = RunRecord(
            command=command,
            parameters=json.dumps(parameters, sort_keys=True, default=str),
            seed=seed,
            verdict=verdict,
            exit_code=exit_code,
            report=report,
            execution_time_ms=execution_time_ms,
            memory_usage_mb=round(memory_usage_mb(), 2),
        )
        session.add(record)
        session.flush()
        session.refresh(record)
        summary = RunSummary.model_validate(record)
    logger.info(f"Recorded run {summary.uuid}: {command} -> {verdict}")
    return summary


def list_runs(limit: int = 20, command: Optional[str] = None) -> List[RunSummary]:
    with get_session() as session:
        query = select(RunRecord).order_by(RunRecord.id.desc()).limit(limit)
        if command:
            query = query.where(RunRecord.command == command)
        return [RunSummary.model_validate(record) for record in session.scalars(query)]
