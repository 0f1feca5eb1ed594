"""Collaborative sync: the project store, revision log, and HTTP service."""

from .service import create_app
from .store import (
    ChangeSet,
    LogRecord,
    ProjectStore,
    apply_logged_op,
    entry_to_wire,
    parse_changeset,
)

__all__ = [
    "ChangeSet",
    "LogRecord",
    "ProjectStore",
    "apply_logged_op",
    "create_app",
    "entry_to_wire",
    "parse_changeset",
]
