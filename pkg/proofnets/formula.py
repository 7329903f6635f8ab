"""
Formulas of multiplicative linear logic with atomic literals.

Text syntax: atoms are written `X+` / `X-`, units `1` and `bot`, and binary
connectives `(A * B)` for tensor and `(A | B)` for par.
"""
from dataclasses import dataclass
from typing import List, Union

from proofnets.errors import FormulaSyntaxError


@dataclass(frozen=True)
class Atom:
    name: str
    positive: bool

    def dual(self) -> "Atom":
        return Atom(self.name, not self.positive)

    def __str__(self) -> str:
        return f"{self.name}{'+' if self.positive else '-'}"


@dataclass(frozen=True)
class One:
    def dual(self) -> "Bottom":
        return Bottom()

    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Bottom:
    def dual(self) -> One:
        return One()

    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"

    def dual(self) -> "Par":
        return Par(self.left.dual(), self.right.dual())

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Par:
    left: "Formula"
    right: "Formula"

    def dual(self) -> Tensor:
        return Tensor(self.left.dual(), self.right.dual())

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


Formula = Union[Atom, One, Bottom, Tensor, Par]


def pos(name: str) -> Atom:
    return Atom(name, True)


def neg(name: str) -> Atom:
    return Atom(name, False)


def is_atomic(formula: Formula) -> bool:
    return isinstance(formula, Atom)


def atoms_of(formula: Formula) -> List[str]:
    if isinstance(formula, Atom):
        return [formula.name]
    if isinstance(formula, (Tensor, Par)):
        return atoms_of(formula.left) + atoms_of(formula.right)
    return []


def _tokenize(text: str) -> List[str]:
    tokens: List[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()*|":
            tokens.append(ch)
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()*|":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def fail(self, reason: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(f"cannot parse formula {self.text!r}: {reason}")

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def formula(self) -> Formula:
        left = self.unit()
        op = self.peek()
        if op in ("*", "|"):
            self.take()
            right = self.formula()
            return Tensor(left, right) if op == "*" else Par(left, right)
        return left

    def unit(self) -> Formula:
        tok = self.take()
        if tok == "(":
            inner = self.formula()
            if self.take() != ")":
                raise self.fail("missing ')'")
            return inner
        if tok == "1":
            return One()
        if tok == "bot":
            return Bottom()
        if len(tok) >= 2 and tok[-1] in "+-":
            return Atom(tok[:-1], tok[-1] == "+")
        raise self.fail(f"unexpected token {tok!r}")


def parse_formula(text: str) -> Formula:
    """Parse the text syntax; binary connectives associate to the right."""
    parser = _Parser(text)
    result = parser.formula()
    if parser.peek() is not None:
        raise parser.fail(f"trailing input at {parser.peek()!r}")
    return result
