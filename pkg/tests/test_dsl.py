"""Surface syntax: parsing, rendering, error recovery.

The round-trip property (parse then render then parse reaches a fixpoint)
is the contract the corpus loader and the service rely on, so it gets a
randomized treatment on top of the handwritten cases.
"""

import pytest
from hypothesis import given, settings, strategies as st

from abr.dsl import (
    AbducibleStmt,
    FactStmt,
    ParseError,
    PrefStmt,
    RuleStmt,
    parse_program,
    parse_query,
    program_to_kb,
    render_program,
    render_statement,
)
from abr.kb import DateApplicable, NotEqual
from abr.terms import Atom, Constant, Integer, Layer, ListTerm, Literal, Variable


def parse_one(text):
    program = parse_program(text)
    assert not program.errors, program.errors
    assert len(program.statements) == 1
    return program.statements[0]


def test_rule_statement_shape():
    stmt = parse_one(
        "rule op_2 [operational]: neg hasMotive(X, A) <- "
        "hasMotive(Y, A), X != Y.")
    assert isinstance(stmt, RuleStmt)
    assert stmt.id == "op_2"
    assert stmt.layer is Layer.OPERATIONAL
    assert not stmt.head.positive
    assert isinstance(stmt.body[1], NotEqual)


def test_date_builtin_normalized_at_load():
    # the statement keeps the surface literal; add_rule swaps in the builtin
    program = parse_program(
        "rule op_7 [operational]: p(X) <- q(X, D1, D2), dateApplicable(D1, D2).")
    kb = program_to_kb(program)
    assert isinstance(kb.rules["op_7"].body[1], DateApplicable)


def test_fact_statement_with_and_without_label():
    labeled = parse_one("fact f_1: country(iran).")
    assert isinstance(labeled, FactStmt) and labeled.label == "f_1"
    bare = parse_one("fact country(iran).")
    assert bare.label is None


def test_preference_statement_shape():
    stmt = parse_one("prefer p_1: str_2 > str_1.")
    assert isinstance(stmt, PrefStmt)
    assert (stmt.higher, stmt.lower) == ("str_2", "str_1")


def test_abducible_statement_shape():
    stmt = parse_one("abducible specificTarget/1.")
    assert isinstance(stmt, AbducibleStmt)
    assert (stmt.predicate, stmt.arity) == ("specificTarget", 1)


def test_comments_and_blank_lines_ignored():
    program = parse_program(
        "% top comment\n\nfact country(iran). % trailing\n% another\n")
    assert len(program.statements) == 1


def test_error_recovery_keeps_good_statements():
    program = parse_program(
        "fact country(iran).\n"
        "rule broken [technical: p(X).\n"
        "fact country(israel).\n")
    assert len(program.statements) == 2
    assert len(program.errors) == 1
    err = program.errors[0]
    assert err.line == 2
    assert err.col > 0


def test_error_positions_are_one_based():
    program = parse_program("fact country(iran?).")
    assert program.errors
    err = program.errors[0]
    assert err.line == 1
    assert err.col == 18


def test_parse_query_single_literal():
    goal = parse_query("isCulprit(X, usBHack)")
    assert goal.predicate == "isCulprit"
    assert goal.atom.args[1] == Constant("usBHack")


def test_parse_query_rejects_trailing_period():
    with pytest.raises(ParseError):
        parse_query("isCulprit(X, usBHack).")


def test_parse_query_rejects_two_literals():
    with pytest.raises(ParseError):
        parse_query("p(X), q(X)")


def test_program_to_kb_background_forces_layer():
    program = parse_program("fact country(iran).")
    kb = program_to_kb(program, provenance="background")
    fact = kb.facts[0]
    assert fact.layer is Layer.BACKGROUND
    assert fact.provenance == "background"


def test_program_to_kb_evidence_defaults_technical():
    kb = program_to_kb(parse_program("fact highLevelSkill(usBHack)."))
    assert kb.facts[0].layer is Layer.TECHNICAL


# ---- randomized round-trip -------------------------------------------

names = st.sampled_from(["p", "q", "r", "hasCap", "isCulprit", "gci_tier"])
symbols = st.sampled_from(["a", "b", "iran", "usBHack", "north_korea"])
labels = st.sampled_from(["t_1", "t_2", "op_3", "str_1", "f_9", "x_2"])
variables = st.sampled_from(["X", "Y", "Att", "D1"]).map(Variable)
constants = symbols.map(Constant)
integers = st.integers(min_value=-40, max_value=2100).map(Integer)
flat = st.one_of(constants, integers, variables)
terms = st.one_of(flat, st.lists(flat, max_size=3).map(lambda xs: ListTerm(tuple(xs))))
ground_terms = st.one_of(
    constants, integers,
    st.lists(st.one_of(constants, integers), max_size=3)
    .map(lambda xs: ListTerm(tuple(xs))))


def make_literal(draw_args, positive):
    name, args = draw_args
    return Literal(Atom(name, tuple(args)), positive)


literals = st.builds(
    make_literal,
    st.tuples(names, st.lists(terms, max_size=3)),
    st.booleans())
ground_literals = st.builds(
    make_literal,
    st.tuples(names, st.lists(ground_terms, max_size=3)),
    st.booleans())

# dateApplicable stays a plain literal until add_rule normalizes it, so the
# statement-level round trip only sees literals and != conditions
conditions = st.one_of(literals, st.builds(NotEqual, flat, flat))

rule_stmts = st.builds(
    lambda i, layer, head, body: RuleStmt(f"r_{i}", layer, head, tuple(body)),
    st.integers(0, 99), st.sampled_from(list(Layer)), literals,
    st.lists(conditions, max_size=3))
pref_stmts = st.builds(
    lambda i, hi, lo, body: PrefStmt(f"pr_{i}", hi, lo, tuple(body)),
    st.integers(0, 99), labels, labels, st.lists(literals, max_size=2))
fact_stmts = st.builds(
    lambda label, l: FactStmt(label, l),
    st.one_of(st.none(), labels), ground_literals)
abducible_stmts = st.builds(
    lambda n, a: AbducibleStmt(n, a), names, st.integers(0, 3))

statements = st.one_of(rule_stmts, pref_stmts, fact_stmts, abducible_stmts)


@settings(max_examples=200, deadline=None)
@given(st.lists(statements, max_size=8))
def test_render_parse_fixpoint(stmts):
    text = "".join(render_statement(s) + "\n" for s in stmts)
    program = parse_program(text)
    assert not program.errors
    assert list(program.statements) == stmts
    assert render_program(program) == text
