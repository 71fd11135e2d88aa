"""Exception types shared across the package."""

from __future__ import annotations


class XidimError(Exception):
    """Base class for all package errors."""


class BudgetExceeded(XidimError):
    """A search or enumeration ran past its configured budget."""


class PreconditionError(XidimError, ValueError):
    """Input violates an operation's precondition.

    ``witness`` carries whatever concrete object demonstrates the violation
    (a pair of blocks, an oversized block, a bad radius, ...).
    """

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class ParseError(XidimError, ValueError):
    """Malformed ordinal, family, point-cloud or cover input."""


class ChainDefect(XidimError, AssertionError):
    """A construction produced something its lemma rules out (e.g. an empty
    final set).  Carries a report so the instance can be reproduced."""

    def __init__(self, message: str, report: object = None):
        super().__init__(message)
        self.report = report
