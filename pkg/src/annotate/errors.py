"""Exception hierarchy and the Violation record shared across the package.

Every domain failure raises a subclass of :class:`AnnotationError`, so callers
can catch the whole family or a precise condition.  Validation routines never
raise; they return lists of :class:`Violation` instead.
"""

from __future__ import annotations

from dataclasses import dataclass


class AnnotationError(Exception):
    """Base class for all errors raised by this package."""


# -- model ------------------------------------------------------------------

class EmptyName(AnnotationError):
    pass


class EmptyUri(AnnotationError):
    pass


class InvalidOptions(AnnotationError):
    pass


class DuplicateName(AnnotationError):
    pass


class UnknownFile(AnnotationError):
    pass


class UnknownAttribute(AnnotationError):
    pass


class UnknownMetadata(AnnotationError):
    pass


class AnchorMismatch(AnnotationError):
    pass


class BadZ(AnnotationError):
    pass


class ShapeOnAudio(AnnotationError):
    pass


class InvalidShape(AnnotationError):
    """An entry carries a shape that fails its geometric invariants."""

    def __init__(self, message: str, violations: list["Violation"] | None = None):
        super().__init__(message)
        self.violations = violations or []


class InvalidValue(AnnotationError):
    pass


# -- geometry ---------------------------------------------------------------

class NonPositiveFactor(AnnotationError):
    pass


# -- timeline ---------------------------------------------------------------

class SegmentPastEnd(AnnotationError):
    pass


# -- gridview ---------------------------------------------------------------

class StaleGroup(AnnotationError):
    pass


class NotMember(AnnotationError):
    pass


# -- serialization ----------------------------------------------------------

class InvalidProject(AnnotationError):
    """A project (or a document describing one) fails validation."""

    def __init__(self, violations: list["Violation"]):
        lines = "; ".join(str(v) for v in violations[:5])
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"invalid project: {lines}{more}")
        self.violations = violations


class ParseError(AnnotationError):
    """Document could not be decoded or parsed; carries a byte/char position."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SchemaVersionUnsupported(AnnotationError):
    pass


class HeaderMismatch(AnnotationError):
    pass


class RowError(AnnotationError):
    """A CSV row could not be imported; carries the 1-based line number."""

    def __init__(self, line: int, cause: str):
        super().__init__(f"line {line}: {cause}")
        self.line = line
        self.cause = cause


# -- collab service ---------------------------------------------------------

class UnknownProject(AnnotationError):
    pass


class DuplicateProject(AnnotationError):
    pass


class RevisionAhead(AnnotationError):
    """Client asked for changes since a revision the server has not reached."""


class StaleSince(AnnotationError):
    """Client's revision predates the server's change log; resync required."""


class MalformedChangeSet(AnnotationError):
    pass


class ReplayMismatch(AnnotationError):
    """Replaying the revision log diverged from the recorded outcome."""


# -- warnings ----------------------------------------------------------------

class UnknownFieldWarning(UserWarning):
    """A document carried keys this schema version does not know; ignored."""


# -- violations ---------------------------------------------------------------

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    """One broken rule, attributed to the offending id.

    severity is ``"error"`` for invariant breaks and ``"warning"`` for
    accepted-but-suspicious data (e.g. self-intersecting polygons).
    """

    code: str
    subject: str
    message: str
    severity: str = ERROR

    def __str__(self) -> str:
        return f"{self.severity}:{self.code}[{self.subject}] {self.message}"
