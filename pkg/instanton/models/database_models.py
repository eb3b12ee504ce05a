import uuid

from sqlalchemy import Column, DateTime, Float, Index, Integer, String, Text
from sqlalchemy.orm import declarative_mixin
from sqlalchemy.sql import func

from instanton.core.database import Base


@declarative_mixin
class UUIDMixin:
    uuid = Column(String(36), unique=True, index=True, default=lambda: str(uuid.uuid4()))


class RunRecord(Base, UUIDMixin):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(32), nullable=False)
    parameters = Column(Text, nullable=False)
    seed = Column(Integer)
    verdict = Column(String(16), nullable=False)
    exit_code = Column(Integer, nullable=False)
    report = Column(Text)
    execution_time_ms = Column(Integer, default=0)
    memory_usage_mb = Column(Float, default=0.0)
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    __table_args__ = (
        Index('idx_run_command', 'command'),
        Index('idx_run_verdict', 'verdict'),
        Index('idx_run_created', 'created_at'),
    )
