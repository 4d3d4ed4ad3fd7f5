"""Acceptance gate. One test per numbered criterion; run with -v to get a
pass/fail line for each. The printed detail surfaces on failure."""

import subprocess
import time
from pathlib import Path

import pytest

from abr.argumentation import AcceptanceStatus, query
from abr.cli import main
from abr.corpus import SCENARIOS, load_corpus, load_scenario
from abr.dsl import (
    PrefStmt,
    RuleStmt,
    SourceProgram,
    parse_program,
    parse_query,
    program_to_kb,
    render_program,
)
from abr.inference import missing_evidence_hints, support_rules
from abr.kb import validate_kb
from abr.terms import Layer
from abr.unification import unify_literals

from oracle import cross_check

CULPRIT = "isCulprit(X, usBHack)"


def answer_table(kb, goal_text):
    return {str(a.binding_dict().get("X")): a.status
            for a in query(kb, parse_query(goal_text))}


def test_criterion_1_us_bank_end_to_end():
    started = time.perf_counter()
    kb, _ = load_scenario("us_bank")
    answers = query(kb, parse_query(CULPRIT))
    elapsed = time.perf_counter() - started

    assert len(answers) == 1
    answer = answers[0]
    assert str(answer.binding_dict()["X"]) == "iran"
    assert answer.status is AcceptanceStatus.SCEPTICAL
    assert {str(h) for h in answer.hypotheses} == {"specificTarget(usBHack)"}

    support = support_rules(answer.argument)
    assert {"t_4", "op_3", "op_4", "op_7", "str_3"} <= support
    cited_facts = {kb.fact_by_id(label).literal.predicate
                   for label in support if kb.fact_by_id(label) is not None}
    assert "t_8" in support or "cybersuperpower" in cited_facts
    assert elapsed < 1.0
    print(f"criterion 1: PASS - iran sceptical with the expected support "
          f"in {elapsed:.2f}s")


def test_criterion_2_claim_adds_second_answer():
    kb, _ = load_scenario("us_bank")
    kb = kb.add_fact(parse_query("claimResp(alQassamCF, usBHack)"),
                     Layer.TECHNICAL)
    answers = query(kb, parse_query(CULPRIT))
    bindings = {str(a.binding_dict()["X"]): a for a in answers}
    assert set(bindings) == {"iran", "alQassamCF"}
    assert "str_1" in support_rules(bindings["alQassamCF"].argument)
    print("criterion 2: PASS - claimResp adds an alQassamCF answer via str_1")


def test_criterion_3_preference_resolution():
    source = (Path(__file__).resolve().parents[1]
              / "src" / "abr" / "corpus" / "rules.abr").read_text()
    wanted = {"str_1", "str_2", "p_1"}
    kept = [s for s in parse_program(source).statements
            if isinstance(s, (RuleStmt, PrefStmt)) and s.id in wanted]
    assert {s.id for s in kept} == wanted

    facts = "fact claimResp(c, a).\nfact neg hasCap(c, a).\n"

    def kb_with(preference):
        statements = tuple(s for s in kept
                           if preference or not isinstance(s, PrefStmt))
        kb = program_to_kb(SourceProgram(statements))
        return program_to_kb(parse_program(facts), base=kb)

    ranked = kb_with(preference=True)
    assert answer_table(ranked, "neg isCulprit(X, a)") == {
        "c": AcceptanceStatus.SCEPTICAL}
    positive = answer_table(ranked, "isCulprit(X, a)")
    assert AcceptanceStatus.SCEPTICAL not in positive.values()

    flat = kb_with(preference=False)
    assert answer_table(flat, "isCulprit(X, a)") == {
        "c": AcceptanceStatus.CREDULOUS}
    assert answer_table(flat, "neg isCulprit(X, a)") == {
        "c": AcceptanceStatus.CREDULOUS}
    print("criterion 3: PASS - p_1 makes str_2 strict; without it both "
          "sides are credulous")


def test_criterion_4_second_target_defeats_hypothesis():
    kb, _ = load_scenario("us_bank")
    answers = query(kb, parse_query(CULPRIT))
    assert {str(h) for h in answers[0].hypotheses} == {"specificTarget(usBHack)"}

    widened = kb.add_fact(parse_query("target(second_bank, usBHack)"),
                          Layer.TECHNICAL)
    after = answer_table(widened, CULPRIT)
    assert after.get("iran") is not AcceptanceStatus.SCEPTICAL
    print("criterion 4: PASS - a second target activates op_2 and retires "
          "the specific-target hypothesis")


def test_criterion_5_oracle_equivalence():
    started = time.perf_counter()
    checked, mismatches = cross_check(range(200), max_depth=4)
    elapsed = time.perf_counter() - started
    assert mismatches == [], mismatches[:5]
    assert elapsed < 60.0
    print(f"criterion 5: PASS - {checked} ground goals across 200 KBs "
          f"matched in {elapsed:.1f}s")


def test_criterion_6_scenario_regression():
    stux, _ = load_scenario("stuxnet")
    stux_culprits = {
        str(a.binding_dict()["X"])
        for a in query(stux, parse_query("isCulprit(X, stuxnet)"))
        if a.status is AcceptanceStatus.SCEPTICAL}
    assert {"united_states", "israel"} <= stux_culprits

    sony, _ = load_scenario("sony")
    sony_answers = query(sony, parse_query("isCulprit(X, sonyHack)"))
    assert len(sony_answers) == 3
    assert {str(a.binding_dict()["X"]) for a in sony_answers} == {
        "north_korea", "iran", "guardians_of_peace"}

    conficker, _ = load_scenario("conficker")
    goal = parse_query("isCulprit(X, conficker)")
    conficker_answers = query(conficker, goal)
    assert all(a.status is not AcceptanceStatus.SCEPTICAL
               for a in conficker_answers)
    assert len(missing_evidence_hints(conficker, goal)) >= 1
    print("criterion 6: PASS - stuxnet, sony, and conficker bundles hold")


def test_criterion_7_dsl_round_trip():
    import importlib.resources

    root = importlib.resources.files("abr.corpus")
    shipped = [root / "rules.abr", root / "background.abr"]
    shipped += sorted((root / "scenarios").iterdir(), key=lambda e: e.name)
    count = 0
    for entry in shipped:
        if not entry.name.endswith(".abr"):
            continue
        program = parse_program(entry.read_text())
        assert not program.errors, (entry.name, program.errors)
        canonical = render_program(program)
        again = parse_program(canonical)
        assert list(again.statements) == list(program.statements), entry.name
        assert render_program(again) == canonical, entry.name
        count += 1
    assert count >= 6
    report = validate_kb(load_corpus())
    assert report.ok, [e.message for e in report.errors]
    print(f"criterion 7: PASS - {count} shipped files reach the render "
          "fixpoint; corpus validates clean")


def test_criterion_8_hint_bound_and_recovery(tmp_path, capsys):
    gaps = tmp_path / "gaps.abr"
    gaps.write_text("\n".join(
        f"rule r_{i} [technical]: p(X) <- gap{i}(X)." for i in range(9)) + "\n")
    assert main(["query", "--format", "json", "--hints", "3",
                 "-k", str(gaps), "p(a)"]) == 0
    import json as json_mod
    doc = json_mod.loads(capsys.readouterr().out)
    assert len(doc["hints"]) == 3

    kb, bundle = load_scenario("us_bank")
    goal = parse_query(CULPRIT)
    evidence = [f for f in kb.facts if f.provenance == "evidence"]
    assert len(evidence) == 6
    recovered = 0
    for fact in evidence:
        trimmed = load_corpus()
        for other in evidence:
            if other is fact:
                continue
            trimmed = trimmed.add_fact(other.literal, Layer.TECHNICAL)
        # a roomy bound so recovery measures reachability, not truncation
        hints = missing_evidence_hints(trimmed, goal, bound=200)
        named = any(
            h.kind == "missingPremise"
            and any(unify_literals(m, fact.literal) is not None
                    for m in h.missing)
            for h in hints)
        recovered += named
    assert recovered >= 4
    print(f"criterion 8: PASS - hint bound respected; delete-one-fact "
          f"recovers {recovered}/6 facts")


def test_criterion_9_ui_contract():
    frontend = Path(__file__).resolve().parents[1] / "frontend"
    if not (frontend / "package.json").exists():
        pytest.skip("frontend not present; UI contract covered by vitest")
    result = subprocess.run(
        ["npx", "vitest", "run", "--reporter", "basic"],
        cwd=frontend, capture_output=True, text=True, timeout=300)
    assert result.returncode == 0, result.stdout + result.stderr
    print("criterion 9: PASS - vitest UI contract suite green")
