import logging
import os
from contextlib import contextmanager
from typing import Iterator

from sqlalchemy import create_engine, event, text
from sqlalchemy.orm import Session, declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from instanton.config import settings

logger = logging.getLogger(__name__)

# Sync engine for the SQLite run ledger
engine = create_engine(settings.DATABASE_URL, poolclass=StaticPool, pool_pre_ping=True,
                       connect_args={"check_same_thread": False, "timeout": 30})

SessionLocal = sessionmaker(bind=engine, expire_on_commit=False, autoflush=False)

Base = declarative_base()


@event.listens_for(engine, "connect")
def set_sqlite_pragma(dbapi_connection, connection_record):
    """Write-ahead logging and a busy timeout for concurrent CLI runs"""
    cursor = dbapi_connection.cursor()
    try:
        for pragma in ["PRAGMA journal_mode=WAL", "PRAGMA synchronous=NORMAL", "PRAGMA busy_timeout=30000"]:
            cursor.execute(pragma)
    except Exception as e:
        logger.error(f"Failed to set SQLite pragmas: {e}")
    finally:
        cursor.close()


@contextmanager
def get_session() -> Iterator[Session]:
    session = SessionLocal()
    try:
        yield session
        session.commit()
    except Exception as e:
        session.rollback()
        logger.error(f"Database session error: {e}")
        raise
    finally:
        session.close()


def _ensure_directories():
    if settings.DATABASE_URL.startswith("sqlite:///"):
        directory = os.path.dirname(settings.DATABASE_URL[len("sqlite:///"):])
        if directory:
            os.makedirs(directory, exist_ok=True)


def init_db():
    """Create the ledger tables"""
    # registers RunRecord on Base.metadata
    from instanton.models import database_models  # noqa: F401

    try:
        _ensure_directories()
        Base.metadata.create_all(bind=engine)
        with engine.begin() as conn:
            conn.execute(text("ANALYZE"))
        logger.info("Run ledger initialized")
    except Exception as e:
        logger.error(f"Run ledger initialization failed: {e}")
        raise
