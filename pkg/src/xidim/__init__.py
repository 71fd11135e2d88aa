"""Ordinal-indexed set families, lattice spaces with transfinite asymptotic
dimension, and finite-scale checks of their cover properties."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .errors import BudgetExceeded, ChainDefect, ParseError, PreconditionError, XidimError
from .ordinal import OMEGA, ONE, ZERO, Ordinal, add, compare, decompose, is_limit, zeta

__all__ = [
    "__version__",
    "Ordinal",
    "ZERO",
    "ONE",
    "OMEGA",
    "compare",
    "add",
    "decompose",
    "is_limit",
    "zeta",
    "XidimError",
    "BudgetExceeded",
    "ChainDefect",
    "ParseError",
    "PreconditionError",
]
