"""Term and literal vocabulary shared by every other module.

Everything here is immutable and hashable, so substitutions can key on
variables, knowledge-base snapshots can share structure, and argument
trees can be compared structurally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

_IDENT_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_VAR_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


class Layer(Enum):
    """Reasoning layer a rule or fact belongs to.

    background is reserved for knowledge that is not case evidence; the
    other three follow the technical -> operational -> strategic flow.
    """

    TECHNICAL = "technical"
    OPERATIONAL = "operational"
    STRATEGIC = "strategic"
    BACKGROUND = "background"

    @property
    def rank(self) -> int:
        return _LAYER_RANK[self]

    @classmethod
    def from_name(cls, name: str) -> "Layer":
        for layer in cls:
            if layer.value == name:
                return layer
        raise ValueError(f"unknown layer: {name!r}")


_LAYER_RANK = {
    Layer.BACKGROUND: 0,
    Layer.TECHNICAL: 1,
    Layer.OPERATIONAL: 2,
    Layer.STRATEGIC: 3,
}


@dataclass(frozen=True)
class Constant:
    symbol: str

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.symbol):
            raise ValueError(f"constant must match [a-z][A-Za-z0-9_]*: {self.symbol!r}")

    def __str__(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class Variable:
    """A logic variable.

    index > 0 marks a standardized-apart copy made during rule application;
    parsed programs always carry index 0. The index keeps renamed copies
    distinct without inventing names that could collide with user variables.
    """

    name: str
    index: int = 0

    def __post_init__(self) -> None:
        if not _VAR_RE.match(self.name):
            raise ValueError(f"variable must match [A-Z][A-Za-z0-9_]*: {self.name!r}")

    def __str__(self) -> str:
        return self.name if self.index == 0 else f"{self.name}#{self.index}"


@dataclass(frozen=True)
class Integer:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class ListTerm:
    items: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return "[" + ", ".join(str(t) for t in self.items) + "]"


Term = Union[Constant, Variable, Integer, ListTerm]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.predicate):
            raise ValueError(f"predicate must match [a-z][A-Za-z0-9_]*: {self.predicate!r}")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Literal:
    """A literal: an atom or its explicit negation."""

    atom: Atom
    positive: bool = True

    @property
    def predicate(self) -> str:
        return self.atom.predicate

    @property
    def arity(self) -> int:
        return self.atom.arity

    @property
    def args(self) -> tuple[Term, ...]:
        return self.atom.args

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    @property
    def sign_key(self) -> tuple[str, int, bool]:
        """Index key used for rule/fact lookup: predicate, arity, sign."""
        return (self.atom.predicate, self.atom.arity, self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"neg {self.atom}"


def variables_of(obj: object) -> Iterator[Variable]:
    """Yield every variable occurring in a term, atom or literal (with repeats)."""
    if isinstance(obj, Variable):
        yield obj
    elif isinstance(obj, ListTerm):
        for item in obj.items:
            yield from variables_of(item)
    elif isinstance(obj, Atom):
        for arg in obj.args:
            yield from variables_of(arg)
    elif isinstance(obj, Literal):
        yield from variables_of(obj.atom)


def is_ground(obj: object) -> bool:
    return next(variables_of(obj), None) is None


def positive_atom(predicate: str, *args: Term) -> Literal:
    return Literal(Atom(predicate, tuple(args)))


def const(symbol: str) -> Constant:
    return Constant(symbol)


def var(name: str) -> Variable:
    return Variable(name)
