"""Domain errors shared by the codec, engine, ledger and HTTP facade.

Every error carries a stable ``code`` string; the HTTP layer maps codes to
status codes, the CLI maps them to exit codes.
"""

from __future__ import annotations


class ChainShareError(Exception):
    """Base class for all domain errors."""

    code = "INTERNAL"

    def __init__(self, detail: str, *, path: str | None = None):
        super().__init__(detail)
        self.detail = detail
        self.path = path


class MalformedDocument(ChainShareError):
    """Input is not well-formed JSON."""

    code = "MALFORMED_DOCUMENT"


class SchemaViolation(ChainShareError):
    """A field has the wrong type or value domain; ``path`` names the offender."""

    code = "SCHEMA_VIOLATION"


class DuplicateKey(ChainShareError):
    """A (level, resource) or (level, resource, supplier) coordinate is repeated."""

    code = "DUPLICATE_KEY"


class DegenerateSupply(ChainShareError):
    """Supply parameters make a sharing formula undefined (zero divisor)."""

    code = "DEGENERATE_SUPPLY"


class EmptyGroup(ChainShareError):
    """A resource group has no supplies to take a minimum over."""

    code = "EMPTY_GROUP"


class MissingOriginatorNode(ChainShareError):
    """ORIGINATOR_PAYS needs an originator node that exists in the chain."""

    code = "MISSING_ORIGINATOR_NODE"


class ZeroTotalIncome(ChainShareError):
    """SHARED cost policy cannot pro-rate a positive charge over zero income."""

    code = "ZERO_TOTAL_INCOME"


class ValidationFailed(ChainShareError):
    """Structural validation rejected the chain; carries the full report."""

    code = "VALIDATION_FAILED"

    def __init__(self, report, detail: str = "chain failed validation"):
        super().__init__(detail)
        self.report = report


class UnknownRequest(ChainShareError):
    """No request with this id exists in the ledger state."""

    code = "UNKNOWN_REQUEST"

    def __init__(self, request_id: int):
        super().__init__(f"unknown request {request_id}")
        self.request_id = request_id


class IllegalTransition(ChainShareError):
    """The transaction kind is not legal in the request's current phase."""

    code = "ILLEGAL_TRANSITION"

    def __init__(self, detail: str, *, phase: str | None = None, kind: str | None = None):
        super().__init__(detail)
        self.phase = phase
        self.kind = kind


class CorruptLog(ChainShareError):
    """The on-disk transaction log failed framing, canonicality or hash checks."""

    code = "CORRUPT_LOG"
