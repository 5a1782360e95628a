"""Exception types shared across the toolkit."""

from __future__ import annotations


class CloakwatchError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CloakwatchError):
    """Input could not be tokenized even by the recovering HTML scanner."""


class EmptyInput(CloakwatchError):
    """An operation that needs at least one observation got none."""


class CountMismatch(CloakwatchError):
    """Text and tag observation lists have different lengths."""


class EmptyModel(CloakwatchError):
    """A detection was attempted against a model with no clusters."""


class InvalidUrl(CloakwatchError):
    """The URL is not absolute or cannot be parsed."""


class StoreUnavailable(CloakwatchError):
    """The backing store rejected or failed an operation."""


class FetchError(CloakwatchError):
    """Base class for fetch failures; marks the visit failed, not the job."""


class FetchTimeout(FetchError):
    """The request timed out or the host was unreachable."""


class FetchHttpError(FetchError):
    """The server answered with an error status."""

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"HTTP status {status}")
        self.status = status


class TooManyRedirects(FetchError):
    """The redirect chain exceeded the configured cap."""
