"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` terms with
strictly decreasing exponents (themselves ordinals) and positive integer
coefficients; zero is the empty tuple.  The representation is canonical, so
structural equality is ordinal equality.

Besides comparison and addition the module supplies the limit/finite
decomposition ``xi = gamma + n`` and a fixed fundamental sequence
``zeta(alpha, i)`` for every limit ``alpha``:

* least term ``w^1 * c``:  ``zeta_i = delta + w*(c-1)`` for every ``i``
  (so ``alpha = beta + w`` gives ``zeta_i = beta``);
* least term ``w^(e'+1) * c`` with ``e' >= 1``:
  ``zeta_i = delta + w^(e'+1)*(c-1) + w^e' * i``;
* least term ``w^e * c`` with ``e`` a limit:
  ``zeta_i = delta + w^e*(c-1) + w^(zeta(e, i) + i)``.

In every case ``zeta(alpha, i)`` is a limit or zero and ``zeta(alpha, i) + i``
increases to ``alpha``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterator, Union

from .errors import ParseError

__all__ = [
    "Ordinal",
    "OrdinalLike",
    "ZERO",
    "ONE",
    "OMEGA",
    "as_ordinal",
    "compare",
    "add",
    "decompose",
    "is_limit",
    "zeta",
    "fundamental",
    "omega_power",
    "parse_ordinal",
    "ordinal_from_json",
    "ordinal_to_json",
]


@dataclass(frozen=True, eq=True, repr=False)
class Ordinal:
    terms: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for exp, coef in self.terms:
            if not isinstance(exp, Ordinal):
                raise TypeError(f"exponent must be an Ordinal, got {exp!r}")
            if not isinstance(coef, int) or coef < 1:
                raise ValueError(f"coefficients must be positive integers, got {coef!r}")
            if prev is not None and compare(prev, exp) <= 0:
                raise ValueError("exponents must be strictly decreasing")
            prev = exp

    # -- constructors -----------------------------------------------------
    @classmethod
    def nat(cls, n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are nonnegative")
        return ZERO if n == 0 else cls(((ZERO, n),))

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def __int__(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    # -- arithmetic / ordering ---------------------------------------------
    def __add__(self, other: "OrdinalLike") -> "Ordinal":
        return add(self, other)

    def __radd__(self, other: "OrdinalLike") -> "Ordinal":
        return add(other, self)

    def __lt__(self, other: "OrdinalLike") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "OrdinalLike") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "OrdinalLike") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "OrdinalLike") -> bool:
        return compare(self, other) >= 0

    def __iter__(self) -> Iterator[tuple["Ordinal", int]]:
        return iter(self.terms)

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, coef in self.terms:
            if exp.is_zero():
                parts.append(str(coef))
                continue
            if exp == ONE:
                base = "w"
            elif exp.is_finite() or exp == OMEGA:
                base = f"w^{exp}"
            else:
                base = f"w^({exp})"
            parts.append(base if coef == 1 else f"{base}*{coef}")
        return "+".join(parts)

    # -- derived quantities ------------------------------------------------
    def size(self) -> int:
        """Number of top-level CNF terms."""
        return len(self.terms)

    def max_coefficient(self) -> int:
        """Largest coefficient anywhere in the notation, exponents included."""
        best = 0
        for exp, coef in self.terms:
            best = max(best, coef, exp.max_coefficient())
        return best


OrdinalLike = Union[Ordinal, int]

ZERO = Ordinal(())
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def as_ordinal(x: OrdinalLike) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, bool) or not isinstance(x, int):
        raise TypeError(f"cannot interpret {x!r} as an ordinal")
    return Ordinal.nat(x)


def omega_power(exp: OrdinalLike, coef: int = 1) -> Ordinal:
    """``w^exp * coef``."""
    return Ordinal(((as_ordinal(exp), coef),))


def compare(a: OrdinalLike, b: OrdinalLike) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    a, b = as_ordinal(a), as_ordinal(b)
    if a is b:
        return 0
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def add(a: OrdinalLike, b: OrdinalLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if not b.terms:
        return a
    lead_exp, lead_coef = b.terms[0]
    kept = []
    for exp, coef in a.terms:
        c = compare(exp, lead_exp)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            kept.append((exp, coef + lead_coef))
            return Ordinal(tuple(kept) + b.terms[1:])
        else:
            break
    return Ordinal(tuple(kept) + b.terms)


def decompose(xi: OrdinalLike) -> tuple[Ordinal, int]:
    """Split ``xi`` as ``(gamma, n)`` with ``gamma`` a limit or zero and ``xi = gamma + n``."""
    xi = as_ordinal(xi)
    if xi.terms and xi.terms[-1][0].is_zero():
        return Ordinal(xi.terms[:-1]), xi.terms[-1][1]
    return xi, 0


def is_limit(xi: OrdinalLike) -> bool:
    return as_ordinal(xi).is_limit()


def _predecessor(e: Ordinal) -> Ordinal:
    gamma, n = decompose(e)
    return add(gamma, n - 1)


@lru_cache(maxsize=None)
def _zeta(alpha: Ordinal, i: int) -> Ordinal:
    *head, (exp, coef) = alpha.terms
    prefix = list(head)
    if coef > 1:
        prefix.append((exp, coef - 1))
    if exp == ONE:
        return Ordinal(tuple(prefix))
    if not exp.is_limit():
        tail = (_predecessor(exp), i)
    else:
        tail = (add(_zeta(exp, i), i), 1)
    return Ordinal(tuple(prefix) + (tail,))


def zeta(alpha: OrdinalLike, i: int) -> Ordinal:
    """The limit-or-zero ordinal ``zeta_i(alpha)``, ``i >= 1``."""
    alpha = as_ordinal(alpha)
    if not alpha.is_limit():
        raise ValueError(f"zeta is defined only for limit ordinals, got {alpha}")
    if isinstance(i, bool) or not isinstance(i, int) or i < 1:
        raise ValueError(f"zeta index must be a positive integer, got {i!r}")
    return _zeta(alpha, i)


def fundamental(alpha: OrdinalLike, i: int) -> Ordinal:
    """``zeta(alpha, i) + i``, the i-th element of the fundamental sequence."""
    return add(zeta(alpha, i), i)


# -- text and JSON encodings ---------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        tok = m.group(1) or m.group(2)
        if tok.strip():
            out.append(tok)
        pos = m.end()
    return out


class _Parser:
    # expr := term ('+' term)* ; term := INT | 'w' ['^' exp] ['*' INT]
    # exp := INT | 'w' ['^' exp] | '(' expr ')'
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text.replace("ω", "w"))
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            where = "end of input" if tok is None else repr(tok)
            raise ParseError(f"bad ordinal {self.text!r}: expected {expected or 'a token'} at {where}")
        self.pos += 1
        return tok

    def parse(self) -> Ordinal:
        result = self.expr()
        if self.peek() is not None:
            raise ParseError(f"bad ordinal {self.text!r}: trailing {self.peek()!r}")
        return result

    def expr(self) -> Ordinal:
        acc = self.term()
        while self.peek() == "+":
            self.take("+")
            acc = add(acc, self.term())
        return acc

    def _int(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise ParseError(f"bad ordinal {self.text!r}: expected integer, got {tok!r}")
        return int(tok)

    def term(self) -> Ordinal:
        tok = self.peek()
        if tok is not None and tok.isdigit():
            return Ordinal.nat(self._int())
        self.take("w")
        exp = ONE
        if self.peek() == "^":
            self.take("^")
            exp = self.exponent()
        coef = 1
        if self.peek() == "*":
            self.take("*")
            coef = self._int()
        return omega_power(exp, coef) if coef else ZERO

    def exponent(self) -> Ordinal:
        tok = self.peek()
        if tok == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        if tok is not None and tok.isdigit():
            return Ordinal.nat(self._int())
        self.take("w")
        if self.peek() == "^":
            self.take("^")
            return omega_power(self.exponent())
        return OMEGA


def parse_ordinal(text: str) -> Ordinal:
    """Parse ``w^2+w*3+1`` style notation, or a JSON encoding."""
    stripped = text.strip()
    if stripped.startswith("[") or stripped.startswith("{"):
        try:
            return ordinal_from_json(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad ordinal JSON {text!r}: {exc}") from None
    if not stripped:
        raise ParseError("empty ordinal")
    return _Parser(stripped).parse()


def ordinal_from_json(obj: Any) -> Ordinal:
    """Decode ``0`` / nonnegative int / ``"w"`` / ``[{"exp": ..., "coef": ...}, ...]``."""
    if isinstance(obj, bool):
        raise ParseError(f"not an ordinal: {obj!r}")
    if isinstance(obj, int):
        if obj < 0:
            raise ParseError(f"negative ordinal {obj}")
        return Ordinal.nat(obj)
    if isinstance(obj, str):
        return parse_ordinal(obj)
    if isinstance(obj, list):
        terms = []
        for item in obj:
            if not isinstance(item, dict) or set(item) != {"exp", "coef"}:
                raise ParseError(f"bad CNF term {item!r}")
            coef = item["coef"]
            if isinstance(coef, bool) or not isinstance(coef, int) or coef < 1:
                raise ParseError(f"bad coefficient {coef!r}")
            terms.append((ordinal_from_json(item["exp"]), coef))
        try:
            return Ordinal(tuple(terms))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"not an ordinal: {obj!r}")


def ordinal_to_json(xi: OrdinalLike) -> Any:
    xi = as_ordinal(xi)
    if xi.is_zero():
        return 0
    return [{"exp": ordinal_to_json(e), "coef": c} for e, c in xi.terms]
