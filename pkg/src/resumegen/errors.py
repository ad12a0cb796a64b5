"""Exception hierarchy.

The CLI maps these onto exit codes: ``ConfigError`` -> 1, ``DataError`` -> 2,
``EndpointError`` -> 3.
"""

from __future__ import annotations


class ResumegenError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ResumegenError):
    pass


class DataError(ResumegenError):
    """Input data failed validation."""

    kind = "data-error"


class EndpointError(ResumegenError):
    pass


class CredentialMissing(EndpointError):
    kind = "credential-missing"


class EndpointFailure(EndpointError):
    kind = "endpoint-failure"

    def __init__(self, message: str, triple_id: str | None = None):
        super().__init__(message)
        self.triple_id = triple_id
