"""Exceptions and evaluation size limits shared by the whole package."""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class SizeLimitError(ValueError):
    """An exhaustive enumeration would exceed the configured bound."""


class DivergentLimitError(ArithmeticError):
    """A coefficient of a centered/scaled expansion has no finite limit."""


class ResourceLimitError(RuntimeError):
    """A simulation would allocate more memory than allowed."""


class EigenSolverError(RuntimeError):
    """The dense eigensolver failed to converge."""


class PolynomialParseError(ValueError):
    """Malformed polynomial text; ``position`` is the 0-based column."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at column {position})")
        self.position = position


@dataclasses.dataclass(frozen=True)
class Limits:
    #: largest n for which ``enumerate_nc`` materialises partition objects
    nc_max: int = 10
    #: largest word length for exact moment / cumulant sums
    word_max: int = 8
    #: largest p * max(n_l) for a simulated ensemble
    entries_max: int = 50_000_000


_LIMITS: contextvars.ContextVar[Limits] = contextvars.ContextVar("crosscov_limits", default=Limits())


def current_limits() -> Limits:
    return _LIMITS.get()


@contextlib.contextmanager
def limits(**overrides):
    """Temporarily override :class:`Limits` fields in the current context.

    >>> with limits(word_max=12):
    ...     current_limits().word_max
    12
    """
    token = _LIMITS.set(dataclasses.replace(_LIMITS.get(), **overrides))
    try:
        yield _LIMITS.get()
    finally:
        _LIMITS.reset(token)
