"""Bundled rule base, background knowledge and replayable cases.

Data files live next to this module and are loaded through
importlib.resources, so zipped installs keep working. Knowledge base
snapshots are immutable, which makes the cached corpus safe to share and
extend per session.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

from ..dsl import FactStmt, SourceProgram, parse_program, program_to_kb
from ..kb import KnowledgeBase
from ..terms import Layer

SCENARIOS = ("us_bank", "stuxnet", "sony", "conficker")


class CorpusError(Exception):
    """A bundled data file failed to parse or validate."""


class UnknownScenario(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown scenario {self.name!r}, expected one of {', '.join(SCENARIOS)}"


@dataclass(frozen=True)
class ExpectedAnswer:
    binding: dict
    status: Optional[str] = None


@dataclass(frozen=True)
class ExpectedQuery:
    goal: str
    mode: str = "contains"  # or "exact"
    answers: tuple[ExpectedAnswer, ...] = ()
    no_sceptical: bool = False
    min_hints: int = 0


@dataclass(frozen=True)
class ScenarioBundle:
    name: str
    evidence_file: str
    notes: str
    queries: tuple[ExpectedQuery, ...]
    # canonical fact texts in file order, for seeding session evidence logs
    evidence_facts: tuple[str, ...] = field(default=())


def _read(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def _parse_clean(name: str) -> SourceProgram:
    program = parse_program(_read(name))
    if program.errors:
        first = program.errors[0]
        raise CorpusError(f"{name}: {len(program.errors)} parse error(s), first at {first}")
    return program


@lru_cache(maxsize=None)
def load_corpus() -> KnowledgeBase:
    """Rules plus background knowledge, no case evidence."""
    kb = program_to_kb(_parse_clean("rules.abr"), provenance="background")
    return program_to_kb(_parse_clean("background.abr"), base=kb, provenance="background")


def _bundle(name: str) -> tuple[SourceProgram, ScenarioBundle]:
    if name not in SCENARIOS:
        raise UnknownScenario(name)
    evidence_file = f"scenarios/{name}.abr"
    program = _parse_clean(evidence_file)
    raw = json.loads(_read(f"scenarios/{name}.expect.json"))
    queries = tuple(
        ExpectedQuery(
            goal=q["goal"],
            mode=q.get("mode", "contains"),
            answers=tuple(
                ExpectedAnswer(binding=dict(a["binding"]), status=a.get("status"))
                for a in q.get("answers", ())
            ),
            no_sceptical=q.get("noScepticalAnswers", False),
            min_hints=q.get("minHints", 0),
        )
        for q in raw["queries"]
    )
    facts = tuple(str(s.literal) for s in program.statements if isinstance(s, FactStmt))
    bundle = ScenarioBundle(
        name=raw["name"],
        evidence_file=evidence_file,
        notes=raw["notes"],
        queries=queries,
        evidence_facts=facts,
    )
    return program, bundle


def load_scenario(name: str) -> tuple[KnowledgeBase, ScenarioBundle]:
    """Corpus plus one case's evidence, and what to expect from it."""
    program, bundle = _bundle(name)
    kb = program_to_kb(program, base=load_corpus(), provenance="evidence",
                       fact_layer=Layer.TECHNICAL)
    return kb, bundle


def scenario_bundle(name: str) -> ScenarioBundle:
    """Expectations and evidence texts without building the KB."""
    return _bundle(name)[1]


def list_scenarios() -> tuple[ScenarioBundle, ...]:
    return tuple(scenario_bundle(name) for name in SCENARIOS)


def check_expectations(name: str, config=None) -> tuple[bool, list[str]]:
    """Replay a bundle's expected queries against the engine.

    Returns overall pass/fail plus one human-readable line per check.
    Imported lazily where needed so loading data never drags in the
    whole engine.
    """
    from ..argumentation import query as evaluate
    from ..dsl import parse_query
    from ..inference import missing_evidence_hints

    kb, bundle = load_scenario(name)
    lines: list[str] = []
    ok = True

    def note(passed: bool, text: str) -> None:
        nonlocal ok
        ok = ok and passed
        lines.append(f"{'pass' if passed else 'FAIL'}: {text}")

    for eq in bundle.queries:
        goal = parse_query(eq.goal)
        answers = evaluate(kb, goal, config)
        got = [
            ({var: str(val) for var, val in a.binding}, a.status.value)
            for a in answers
        ]
        for want in eq.answers:
            matches = [
                (b, s) for b, s in got
                if b == want.binding and (want.status is None or s == want.status)
            ]
            note(bool(matches),
                 f"{name}: {eq.goal} expects {want.binding}"
                 + (f" {want.status}" if want.status else ""))
        if eq.mode == "exact":
            note(len(got) == len(eq.answers),
                 f"{name}: {eq.goal} expects exactly {len(eq.answers)} answers, "
                 f"got {len(got)}")
        if eq.no_sceptical:
            sceptical = [b for b, s in got if s == "sceptical"]
            note(not sceptical,
                 f"{name}: {eq.goal} expects no sceptical answer, got {sceptical}")
        if eq.min_hints:
            hints = missing_evidence_hints(kb, goal, config=config)
            note(len(hints) >= eq.min_hints,
                 f"{name}: {eq.goal} expects >= {eq.min_hints} hints, "
                 f"got {len(hints)}")
    return ok, lines
