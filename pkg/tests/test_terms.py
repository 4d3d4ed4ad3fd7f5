"""Term structure basics."""

import pytest

from abr.terms import (
    Atom,
    Constant,
    Integer,
    Layer,
    ListTerm,
    Literal,
    Variable,
    is_ground,
    variables_of,
)


def lit(pred, *args, positive=True):
    return Literal(Atom(pred, tuple(args)), positive)


def test_complement_involution():
    a = lit("isCulprit", Constant("iran"))
    assert a.complement().complement() == a
    assert a.complement().positive is False


def test_sign_key_distinguishes_polarity():
    a = lit("p", Constant("c"))
    assert a.sign_key != a.complement().sign_key
    assert a.sign_key[:2] == a.complement().sign_key[:2]


def test_layer_ranks_are_ordered():
    assert (Layer.BACKGROUND.rank < Layer.TECHNICAL.rank
            < Layer.OPERATIONAL.rank < Layer.STRATEGIC.rank)


def test_variable_rendering_hides_zero_index():
    assert str(Variable("X")) == "X"
    assert str(Variable("X", 3)) == "X#3"
    assert Variable("X") != Variable("X", 3)


def test_list_and_integer_rendering():
    date = ListTerm((Integer(2012), Integer(9)))
    assert str(date) == "[2012, 9]"
    assert str(lit("attackPeriod", Constant("a"), date)) == "attackPeriod(a, [2012, 9])"


def test_predicate_lexicon_enforced():
    with pytest.raises(ValueError):
        Atom("BadName")
    with pytest.raises(ValueError):
        Atom("1digit")


def test_variables_of_reaches_into_lists():
    inner = ListTerm((Variable("X"), Constant("a"), ListTerm((Variable("Y"),))))
    found = set(variables_of(lit("p", inner, Variable("Z"))))
    assert found == {Variable("X"), Variable("Y"), Variable("Z")}


def test_is_ground():
    assert is_ground(lit("p", Constant("a"), ListTerm((Integer(1),))))
    assert not is_ground(lit("p", ListTerm((Variable("X"),))))


def test_negated_literal_renders_with_neg():
    assert str(lit("hasCap", Constant("c"), positive=False)) == "neg hasCap(c)"
