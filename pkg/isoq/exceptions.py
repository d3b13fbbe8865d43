#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Errors raised by the isoq library.

Every error derives from :class:`IsoqError`, itself a :class:`ValueError`,
so callers that only care about bad input can keep catching ``ValueError``.
"""

from typing import Optional


class IsoqError(ValueError):
    pass


class IndexOutOfRange(IsoqError):
    pass


class DimensionMismatch(IsoqError):
    pass


class DimensionTooLarge(IsoqError):
    pass


class ProbabilityError(IsoqError):
    pass


class NotNormalized(IsoqError):
    pass


class NotHermitian(IsoqError):
    pass


class NotAPovm(IsoqError):
    pass


class NotRank1(IsoqError):
    pass


class InvalidEpsilon(IsoqError):
    pass


class InvalidQ(IsoqError):
    pass


class InvalidDepth(IsoqError):
    pass


class RepeatedQubit(IsoqError):
    pass


class DepthMismatch(IsoqError):
    pass


class CapExceeded(IsoqError):
    """The requested enumeration is larger than the allowed cap."""

    def __init__(self, count: int, cap: int, what: str = "items"):
        self.count = count
        self.cap = cap
        super().__init__(
            f"Enumeration would produce {count} {what}, above the cap of {cap}."
        )


class EpsilonTooLarge(IsoqError):
    pass


class PreconditionViolated(IsoqError):
    pass


class DomainError(IsoqError):
    pass


class InvalidSlacks(IsoqError):
    pass


class RateTooLow(IsoqError):
    pass


class TooLarge(IsoqError):
    pass


class InvalidH(IsoqError):
    pass


class IdentityViolation(IsoqError):
    pass


class ZeroProbabilityOutcome(IsoqError):
    pass


class ConfigError(IsoqError):
    """Invalid experiment configuration, naming the offending field."""

    def __init__(self, field: Optional[str], message: str):
        self.field = field
        prefix = f"'{field}': " if field is not None else ""
        super().__init__(prefix + message)


class CheckFailed(IsoqError):
    pass
