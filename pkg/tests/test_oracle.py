"""Engine vs brute-force reference on randomized knowledge bases.

A trimmed seed range keeps the regular suite fast; the acceptance gate
runs the full sweep.
"""

import random

from abr.dsl import parse_program, parse_query, program_to_kb
from abr.inference import ReasonerConfig

from oracle import OracleGame, cross_check, engine_status, enumerate_trees, random_kb


def kb_of(text):
    program = parse_program(text)
    assert not program.errors, program.errors
    return program_to_kb(program)


def test_randomized_cross_check_sample():
    checked, mismatches = cross_check(range(40))
    assert checked > 200
    assert mismatches == []


def test_generator_stays_inside_bounds():
    for seed in range(30):
        kb = random_kb(random.Random(seed))
        assert len(kb.rules) <= 12
        assert len(kb.facts) <= 4
        assert len(kb.preferences) <= 2
        assert not kb.abducibles


def test_oracle_enumeration_respects_height_bound():
    kb = kb_of(
        "rule r_1 [technical]: p(X) <- q(X).\n"
        "rule r_2 [technical]: q(X) <- r(X).\n"
        "fact r(a).\n")
    shallow = enumerate_trees(kb, max_depth=2)
    assert parse_query("p(a)") not in shallow
    deep = enumerate_trees(kb, max_depth=3)
    assert parse_query("p(a)") in deep


def test_oracle_enumeration_is_loop_free():
    kb = kb_of("rule r_1 [technical]: p(X) <- p(X).\nfact q(a).\n")
    trees = enumerate_trees(kb, max_depth=4)
    assert parse_query("p(a)") not in trees


def test_oracle_agrees_on_handcrafted_preference_case():
    src = (
        "rule r_a [technical]: p(X) <- base(X).\n"
        "rule r_b [technical]: neg p(X) <- base(X).\n"
        "fact base(a).\n")
    for extra, expected in (
        ("", "credulous"),
        ("prefer pr_1: r_a > r_b.\n", "sceptical"),
        ("prefer pr_1: r_b > r_a.\n", "notSupported"),
    ):
        kb = kb_of(src + extra)
        goal = parse_query("p(a)")
        game = OracleGame(kb)
        assert game.status(goal) == expected, extra
        assert engine_status(kb, goal, ReasonerConfig(max_depth=4)) == expected
