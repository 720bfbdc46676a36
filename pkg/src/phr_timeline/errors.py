"""Shared error type carrying a machine-readable failure code."""

from __future__ import annotations


class ServiceError(Exception):
    """Raised by any operation that fails a documented rule.

    ``code`` is a stable, uppercase identifier (e.g. ``BAD_CHECKSUM``,
    ``FORBIDDEN_VIEWER``) that callers and HTTP layers can branch on.
    ``details`` carries optional structured context (offending field,
    alert code, ...).
    """

    def __init__(self, code: str, message: str = "", **details):
        super().__init__(message or code)
        self.code = code
        self.message = message or code
        self.details = details

    def to_dict(self) -> dict:
        body = {"error": self.code, "message": self.message}
        if self.details:
            body["details"] = self.details
        return body

    def __repr__(self) -> str:  # pragma: no cover
        return f"ServiceError({self.code!r}, {self.message!r})"
