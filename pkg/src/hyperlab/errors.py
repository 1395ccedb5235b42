from __future__ import annotations


class HyperlabError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(HyperlabError, ValueError):
    pass


class CapacityError(HyperlabError):
    """A request exceeds a documented size cap (enumeration, SNF, sampler)."""


class NumericalFailure(HyperlabError, ArithmeticError):
    pass


class FormatError(HyperlabError, ValueError):
    """Malformed complex, graph or kernel file."""


class InfiniteHomologyError(HyperlabError, ValueError):
    """Raised where a finite group was required but H_1 has a free part."""


class InvariantViolation(HyperlabError, AssertionError):
    """A checked identity or inequality failed; carries the offending case."""

    def __init__(self, message: str, case=None):
        super().__init__(message)
        self.case = case
