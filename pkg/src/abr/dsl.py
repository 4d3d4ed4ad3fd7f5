"""Rule-file syntax: tokenizer, parser, canonical renderer.

The concrete grammar (UTF-8, % comments to end of line, whitespace free):

    program   := statement*
    statement := rulestmt | prefstmt | factstmt | abdstmt
    rulestmt  := "rule" IDENT "[" layer "]" ":" literal ( "<-" body )? "."
    layer     := "technical" | "operational" | "strategic" | "background"
    prefstmt  := "prefer" IDENT ":" IDENT ">" IDENT ( "<-" body )? "."
    factstmt  := "fact" ( IDENT ":" )? literal "."
    abdstmt   := "abducible" IDENT "/" INT "."
    body      := cond ("," cond)*
    cond      := literal | term "!=" term
    literal   := ("neg")? atom
    atom      := IDENT ("(" term ("," term)* ")")?
    term      := VAR | IDENT | INT | "[" (term ("," term)*)? "]"

A malformed statement is reported with its position and parsing resumes
after the next ".", so one bad statement never hides the rest of a file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .kb import ArgumentRule, KnowledgeBase, NotEqual, PreferenceRule
from .terms import Atom, Constant, Integer, Layer, ListTerm, Literal, Term, Variable

LAYER_NAMES = tuple(layer.value for layer in Layer)

_KEYWORDS = ("rule", "prefer", "fact", "abducible")


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col

    def to_dict(self) -> dict:
        return {"message": self.message, "line": self.line, "col": self.col}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT VAR INT PUNCT ARROW NEQ EOF ERROR
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow><-)
      | (?P<neq>!=)
      | (?P<int>-?\d+)
      | (?P<var>[A-Z][A-Za-z0-9_]*)
      | (?P<ident>[a-z][A-Za-z0-9_]*)
      | (?P<punct>[][(),.:>/])
    """,
    re.VERBOSE,
)


_KIND = {"arrow": "ARROW", "neq": "NEQ", "punct": "PUNCT",
         "int": "INT", "var": "VAR", "ident": "IDENT"}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            tokens.append(Token("ERROR", text[pos], line, pos - line_start + 1))
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(_KIND[kind], value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, n - line_start + 1))
    return tokens


Cond = Union[Literal, NotEqual]


@dataclass(frozen=True)
class RuleStmt:
    id: str
    layer: Layer
    head: Literal
    body: tuple[Cond, ...] = ()
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class PrefStmt:
    id: str
    higher: str
    lower: str
    body: tuple[Cond, ...] = ()
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class FactStmt:
    label: Optional[str]
    literal: Literal
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class AbducibleStmt:
    predicate: str
    arity: int
    span: tuple[int, int] = field(default=(0, 0), compare=False)


Statement = Union[RuleStmt, PrefStmt, FactStmt, AbducibleStmt]


@dataclass(frozen=True)
class SourceProgram:
    statements: tuple[Statement, ...]
    errors: tuple[ParseError, ...] = ()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        found = repr(tok.value) if tok.kind != "EOF" else "end of input"
        return ParseError(f"{message}, found {found}", tok.line, tok.col)

    def expect_punct(self, value: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == value:
            return self.advance()
        raise self.fail(f"expected {what}")

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind == "IDENT":
            return self.advance()
        raise self.fail(f"expected {what}")

    # ---- grammar productions ----------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "VAR":
            self.advance()
            return Variable(tok.value)
        if tok.kind == "IDENT":
            self.advance()
            return Constant(tok.value)
        if tok.kind == "INT":
            self.advance()
            return Integer(int(tok.value))
        if tok.kind == "PUNCT" and tok.value == "[":
            self.advance()
            items: list[Term] = []
            if not (self.peek().kind == "PUNCT" and self.peek().value == "]"):
                items.append(self.term())
                while self.peek().kind == "PUNCT" and self.peek().value == ",":
                    self.advance()
                    items.append(self.term())
            self.expect_punct("]", "']' closing list")
            return ListTerm(tuple(items))
        raise self.fail("expected a term")

    def atom(self) -> Atom:
        name = self.expect_ident("a predicate name")
        args: list[Term] = []
        if self.peek().kind == "PUNCT" and self.peek().value == "(":
            self.advance()
            args.append(self.term())
            while self.peek().kind == "PUNCT" and self.peek().value == ",":
                self.advance()
                args.append(self.term())
            self.expect_punct(")", "')' closing argument list")
        return Atom(name.value, tuple(args))

    def literal(self) -> Literal:
        if self.peek().kind == "IDENT" and self.peek().value == "neg":
            self.advance()
            return Literal(self.atom(), positive=False)
        return Literal(self.atom(), positive=True)

    def cond(self) -> Cond:
        tok = self.peek()
        if tok.kind in ("VAR", "INT") or (tok.kind == "PUNCT" and tok.value == "["):
            left = self.term()
            if self.peek().kind != "NEQ":
                raise self.fail("expected '!='")
            self.advance()
            return NotEqual(left, self.term())
        if tok.kind == "IDENT" and tok.value != "neg" and self.peek(1).kind == "NEQ":
            left = self.term()
            self.advance()  # consume !=
            return NotEqual(left, self.term())
        return self.literal()

    def body(self) -> tuple[Cond, ...]:
        conds = [self.cond()]
        while self.peek().kind == "PUNCT" and self.peek().value == ",":
            self.advance()
            conds.append(self.cond())
        return tuple(conds)

    def layer(self) -> Layer:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value in LAYER_NAMES:
            self.advance()
            return Layer.from_name(tok.value)
        raise self.fail("expected a layer (technical, operational, strategic, background)")

    def statement(self) -> Statement:
        tok = self.peek()
        span = (tok.line, tok.col)
        if tok.kind != "IDENT" or tok.value not in _KEYWORDS:
            raise self.fail("expected a statement (rule, prefer, fact, abducible)")
        self.advance()
        if tok.value == "rule":
            rule_id = self.expect_ident("a rule id").value
            self.expect_punct("[", "'['")
            layer = self.layer()
            self.expect_punct("]", "']'")
            self.expect_punct(":", "':'")
            head = self.literal()
            body: tuple[Cond, ...] = ()
            if self.peek().kind == "ARROW":
                self.advance()
                body = self.body()
            self.expect_punct(".", "'.' ending the rule")
            return RuleStmt(rule_id, layer, head, body, span)
        if tok.value == "prefer":
            pref_id = self.expect_ident("a preference id").value
            self.expect_punct(":", "':'")
            higher = self.expect_ident("the preferred label").value
            tok2 = self.peek()
            if not (tok2.kind == "PUNCT" and tok2.value == ">"):
                raise self.fail("expected '>'")
            self.advance()
            lower = self.expect_ident("the deprecated label").value
            body = ()
            if self.peek().kind == "ARROW":
                self.advance()
                body = self.body()
            self.expect_punct(".", "'.' ending the preference")
            return PrefStmt(pref_id, higher, lower, body, span)
        if tok.value == "fact":
            label: Optional[str] = None
            if (
                self.peek().kind == "IDENT"
                and self.peek(1).kind == "PUNCT"
                and self.peek(1).value == ":"
            ):
                label = self.advance().value
                self.advance()
            literal = self.literal()
            self.expect_punct(".", "'.' ending the fact")
            return FactStmt(label, literal, span)
        # abducible
        name = self.expect_ident("an abducible predicate").value
        self.expect_punct("/", "'/'")
        tok2 = self.peek()
        if tok2.kind != "INT":
            raise self.fail("expected an arity")
        self.advance()
        arity = int(tok2.value)
        if arity < 0:
            raise ParseError("arity must be non-negative", tok2.line, tok2.col)
        self.expect_punct(".", "'.' ending the declaration")
        return AbducibleStmt(name, arity, span)

    def resync(self) -> None:
        """Skip past the next '.' so later statements still parse."""
        while True:
            tok = self.advance()
            if tok.kind == "EOF" or (tok.kind == "PUNCT" and tok.value == "."):
                return

    def program(self) -> SourceProgram:
        statements: list[Statement] = []
        errors: list[ParseError] = []
        while self.peek().kind != "EOF":
            try:
                statements.append(self.statement())
            except ParseError as err:
                errors.append(err)
                self.resync()
        return SourceProgram(tuple(statements), tuple(errors))


def parse_program(text: str) -> SourceProgram:
    return _Parser(tokenize(text)).program()


def parse_query(text: str) -> Literal:
    """Parse a single goal literal. No trailing period, nothing else."""
    parser = _Parser(tokenize(text))
    lit = parser.literal()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise parser.fail("goal must be a single literal")
    return lit


# ---- rendering -------------------------------------------------------


def render_condition(cond: Cond) -> str:
    return str(cond)


def render_statement(stmt: Statement) -> str:
    if isinstance(stmt, RuleStmt):
        text = f"rule {stmt.id} [{stmt.layer.value}]: {stmt.head}"
        if stmt.body:
            text += " <- " + ", ".join(render_condition(c) for c in stmt.body)
        return text + "."
    if isinstance(stmt, PrefStmt):
        text = f"prefer {stmt.id}: {stmt.higher} > {stmt.lower}"
        if stmt.body:
            text += " <- " + ", ".join(render_condition(c) for c in stmt.body)
        return text + "."
    if isinstance(stmt, FactStmt):
        if stmt.label is not None:
            return f"fact {stmt.label}: {stmt.literal}."
        return f"fact {stmt.literal}."
    return f"abducible {stmt.predicate}/{stmt.arity}."


def render_program(program: SourceProgram) -> str:
    """Canonical text: one statement per line, comments dropped.

    parse(render(parse(p))) == parse(p) for well-formed programs.
    """
    return "".join(render_statement(s) + "\n" for s in program.statements)


# ---- loading into a knowledge base ------------------------------------


def program_to_kb(
    program: SourceProgram,
    base: Optional[KnowledgeBase] = None,
    provenance: str = "evidence",
    fact_layer: Layer = Layer.TECHNICAL,
) -> KnowledgeBase:
    """Fold parsed statements into a snapshot.

    Facts from the DSL carry no layer of their own; the loader channel
    decides (evidence -> technical, background -> background).
    """
    kb = base if base is not None else KnowledgeBase.empty()
    if provenance == "background":
        fact_layer = Layer.BACKGROUND
    for stmt in program.statements:
        if isinstance(stmt, RuleStmt):
            kb = kb.add_rule(ArgumentRule(stmt.id, stmt.layer, stmt.head, stmt.body))
        elif isinstance(stmt, PrefStmt):
            kb = kb.add_preference(PreferenceRule(stmt.id, stmt.higher, stmt.lower, stmt.body))
        elif isinstance(stmt, FactStmt):
            kb = kb.add_fact(stmt.literal, fact_layer, provenance, label=stmt.label)
        else:
            kb = kb.add_abducible(stmt.predicate, stmt.arity)
    return kb
