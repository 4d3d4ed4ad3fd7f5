"""Immutable knowledge-base snapshots: rules, preferences, facts, abducibles.

Snapshots share structure. add_* methods never mutate the receiver; they
return a new snapshot (or the receiver itself when the addition is a
no-op, e.g. re-asserting an identical fact). Facts are normalized to
bodyless rules with auto-generated labels so preferences can rank them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from .terms import Atom, Layer, ListTerm, Literal, Term, Variable, is_ground, variables_of
from .unification import unify_literals

RESERVED_PREDICATES = frozenset({"dateApplicable"})

PROVENANCES = ("evidence", "background")


class KBError(Exception):
    """Base class for knowledge-base construction errors."""


class DuplicateId(KBError):
    pass


class RangeRestrictionViolation(KBError):
    pass


class ReservedPredicate(KBError):
    pass


class NonGroundFact(KBError):
    pass


class SelfPreference(KBError):
    pass


@dataclass(frozen=True)
class NotEqual:
    """Built-in body condition t1 != t2; both sides must be ground when evaluated."""

    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{self.left} != {self.right}"


@dataclass(frozen=True)
class DateApplicable:
    """Built-in: left date falls in the 12 months starting at the right date.

    Both arguments must be ground [Year, Month] integer lists when evaluated.
    """

    left: Term
    right: Term

    def __str__(self) -> str:
        return f"dateApplicable({self.left}, {self.right})"


BodyCondition = Union[Literal, NotEqual, DateApplicable]


@dataclass(frozen=True)
class ArgumentRule:
    id: str
    layer: Layer
    head: Literal
    body: tuple[BodyCondition, ...] = ()


@dataclass(frozen=True)
class PreferenceRule:
    """Ranks two argument-rule (or fact) labels, optionally under conditions."""

    id: str
    higher: str
    lower: str
    body: tuple[BodyCondition, ...] = ()


@dataclass(frozen=True)
class Fact:
    id: str
    literal: Literal
    layer: Layer
    provenance: str


@dataclass(frozen=True)
class ValidationEntry:
    severity: str  # error | warning | info
    code: str
    message: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[ValidationEntry, ...]

    def by_severity(self, severity: str) -> tuple[ValidationEntry, ...]:
        return tuple(e for e in self.entries if e.severity == severity)

    @property
    def errors(self) -> tuple[ValidationEntry, ...]:
        return self.by_severity("error")

    @property
    def warnings(self) -> tuple[ValidationEntry, ...]:
        return self.by_severity("warning")

    @property
    def infos(self) -> tuple[ValidationEntry, ...]:
        return self.by_severity("info")

    @property
    def ok(self) -> bool:
        return not self.errors


def normalize_condition(cond: BodyCondition) -> BodyCondition:
    """Canonicalize built-ins written as ordinary atoms (dateApplicable/2)."""
    if isinstance(cond, Literal) and cond.positive and cond.predicate == "dateApplicable" and cond.arity == 2:
        return DateApplicable(cond.args[0], cond.args[1])
    return cond


def _check_range_restriction(rule: ArgumentRule) -> None:
    # built-ins cannot bind, so only literal conditions count as binders;
    # negated literals bind exactly like positive ones (explicit negation,
    # no negation-as-failure here)
    bound: set[Variable] = set()
    for cond in rule.body:
        if isinstance(cond, Literal):
            bound.update(variables_of(cond))
    loose = [v for v in set(variables_of(rule.head)) if v not in bound]
    if loose:
        names = ", ".join(sorted(str(v) for v in loose))
        raise RangeRestrictionViolation(
            f"rule {rule.id}: head variable(s) {names} not bound by any body literal"
        )


class _FactLog:
    """Append-only store shared between snapshots; each snapshot sees a prefix."""

    __slots__ = ("items", "by_key", "by_label")

    def __init__(self) -> None:
        self.items: list[Fact] = []
        self.by_key: dict[tuple, int] = {}
        self.by_label: dict[str, int] = {}

    def fork(self, n: int) -> "_FactLog":
        out = _FactLog()
        out.items = self.items[:n]
        out.by_key = {k: p for k, p in self.by_key.items() if p < n}
        out.by_label = {k: p for k, p in self.by_label.items() if p < n}
        return out


@dataclass(frozen=True, eq=False)
class KnowledgeBase:
    rules: dict[str, ArgumentRule] = field(default_factory=dict)
    preferences: dict[str, PreferenceRule] = field(default_factory=dict)
    abducibles: frozenset[tuple[str, int]] = frozenset()
    _log: _FactLog = field(default_factory=_FactLog, repr=False)
    _nfacts: int = 0

    @classmethod
    def empty(cls) -> "KnowledgeBase":
        return cls()

    # ---- read side -------------------------------------------------

    def iter_facts(self) -> Iterator[Fact]:
        for i in range(self._nfacts):
            yield self._log.items[i]

    @property
    def facts(self) -> tuple[Fact, ...]:
        return tuple(self.iter_facts())

    def fact_by_id(self, label: str) -> Optional[Fact]:
        pos = self._log.by_label.get(label)
        if pos is not None and pos < self._nfacts:
            return self._log.items[pos]
        return None

    def fact_for(self, literal: Literal) -> Optional[Fact]:
        """The stored fact with this exact literal, if any (any layer/provenance)."""
        for fact in self.facts_for(literal.sign_key):
            if fact.literal == literal:
                return fact
        return None

    def is_abducible(self, predicate: str, arity: int) -> bool:
        return (predicate, arity) in self.abducibles

    def _has_id(self, label: str) -> bool:
        if label in self.rules or label in self.preferences:
            return True
        pos = self._log.by_label.get(label)
        return pos is not None and pos < self._nfacts

    def rules_for(self, sign_key: tuple[str, int, bool]) -> tuple[ArgumentRule, ...]:
        """Rules whose head matches (predicate, arity, sign), id-sorted."""
        cache = self._rule_index()
        return cache.get(sign_key, ())

    def facts_for(self, sign_key: tuple[str, int, bool]) -> tuple[Fact, ...]:
        cache = self._fact_index()
        return cache.get(sign_key, ())

    # per-snapshot lazy indexes; snapshots are immutable so caching is safe
    def _rule_index(self) -> dict:
        cached = self.__dict__.get("_rule_index_cache")
        if cached is None:
            cached = {}
            for rule in sorted(self.rules.values(), key=lambda r: r.id):
                cached.setdefault(rule.head.sign_key, []).append(rule)
            cached = {k: tuple(v) for k, v in cached.items()}
            object.__setattr__(self, "_rule_index_cache", cached)
        return cached

    def _fact_index(self) -> dict:
        cached = self.__dict__.get("_fact_index_cache")
        if cached is None:
            cached = {}
            for fact in self.iter_facts():
                cached.setdefault(fact.literal.sign_key, []).append(fact)
            cached = {k: tuple(v) for k, v in cached.items()}
            object.__setattr__(self, "_fact_index_cache", cached)
        return cached

    # ---- write side ------------------------------------------------

    def add_rule(self, rule: ArgumentRule) -> "KnowledgeBase":
        if self._has_id(rule.id):
            raise DuplicateId(f"id already in use: {rule.id}")
        if rule.head.predicate in RESERVED_PREDICATES:
            raise ReservedPredicate(f"rule {rule.id}: head predicate {rule.head.predicate} is reserved")
        rule = replace(rule, body=tuple(normalize_condition(c) for c in rule.body))
        _check_range_restriction(rule)
        rules = dict(self.rules)
        rules[rule.id] = rule
        return replace(self, rules=rules)

    def add_preference(self, pref: PreferenceRule) -> "KnowledgeBase":
        if self._has_id(pref.id):
            raise DuplicateId(f"id already in use: {pref.id}")
        if pref.higher == pref.lower:
            raise SelfPreference(f"preference {pref.id}: {pref.higher} ranked against itself")
        pref = replace(pref, body=tuple(normalize_condition(c) for c in pref.body))
        prefs = dict(self.preferences)
        prefs[pref.id] = pref
        return replace(self, preferences=prefs)

    def add_abducible(self, predicate: str, arity: int) -> "KnowledgeBase":
        if predicate in RESERVED_PREDICATES:
            raise ReservedPredicate(f"abducible predicate {predicate} is reserved")
        if (predicate, arity) in self.abducibles:
            return self
        return replace(self, abducibles=self.abducibles | {(predicate, arity)})

    def add_fact(
        self,
        literal: Literal,
        layer: Layer,
        provenance: str = "evidence",
        label: Optional[str] = None,
    ) -> "KnowledgeBase":
        """Store a ground fact.

        Idempotent on (literal, layer, provenance): re-asserting an identical
        fact returns the same snapshot, keeping query results duplicate-free
        when evidence logs are replayed.
        """
        if provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}: {provenance!r}")
        if not is_ground(literal):
            raise NonGroundFact(f"fact must be ground: {literal}")
        if literal.predicate in RESERVED_PREDICATES:
            raise ReservedPredicate(f"fact predicate {literal.predicate} is reserved")
        key = (literal, layer, provenance)
        pos = self._log.by_key.get(key)
        if pos is not None and pos < self._nfacts:
            return self
        log = self._log
        if len(log.items) != self._nfacts:
            # another snapshot already extended the shared log; fork our prefix
            log = log.fork(self._nfacts)
        if label is None:
            k = len(log.items)
            label = f"fact_{k}"
            while self._label_taken(label, log):
                k += 1
                label = f"fact_{k}"
        elif self._label_taken(label, log):
            raise DuplicateId(f"id already in use: {label}")
        fact = Fact(label, literal, layer, provenance)
        position = len(log.items)
        log.items.append(fact)
        log.by_key[key] = position
        log.by_label[label] = position
        return replace(self, _log=log, _nfacts=self._nfacts + 1)

    def _label_taken(self, label: str, log: _FactLog) -> bool:
        if label in self.rules or label in self.preferences:
            return True
        pos = log.by_label.get(label)
        return pos is not None


def _rankable_head(kb: KnowledgeBase, label: str) -> Optional[Literal]:
    rule = kb.rules.get(label)
    if rule is not None:
        return rule.head
    fact = kb.fact_by_id(label)
    if fact is not None:
        return fact.literal
    return None


def _standardize(lit: Literal, bump: int) -> Literal:
    def rn(t: Term) -> Term:
        if isinstance(t, Variable):
            return Variable(t.name, t.index + bump)
        if isinstance(t, ListTerm):
            return ListTerm(tuple(rn(x) for x in t.items))
        return t

    return Literal(Atom(lit.atom.predicate, tuple(rn(a) for a in lit.atom.args)), lit.positive)


def complementary_unifiable(a: Literal, b: Literal) -> bool:
    """True when a and the complement of b unify after renaming apart."""
    return unify_literals(a, _standardize(b.complement(), bump=10_000)) is not None


def validate_kb(kb: KnowledgeBase) -> ValidationReport:
    """Static lint over a snapshot.

    errors: dangling preference labels.
    warnings: priority cycles between rules with unifiable complementary
    heads (preference bodies ignored, conservatively), layer-order
    violations (a rule consuming a predicate only derivable above its own
    layer).
    info: declared abducibles no rule body mentions.
    """
    entries: list[ValidationEntry] = []

    def known(label: str) -> bool:
        return label in kb.rules or kb.fact_by_id(label) is not None

    for pref in kb.preferences.values():
        for label in (pref.higher, pref.lower):
            if not known(label):
                entries.append(
                    ValidationEntry(
                        "error",
                        "dangling-preference-label",
                        f"preference {pref.id} ranks unknown label {label}",
                        (pref.id, label),
                    )
                )

    # transitive closure of the raw preference digraph (tiny; plain BFS per node)
    edges: dict[str, set[str]] = {}
    for pref in kb.preferences.values():
        edges.setdefault(pref.higher, set()).add(pref.lower)

    def reachable(node: str) -> set[str]:
        out: set[str] = set()
        frontier = list(edges.get(node, ()))
        while frontier:
            nxt = frontier.pop()
            if nxt in out:
                continue
            out.add(nxt)
            frontier.extend(edges.get(nxt, ()))
        return out

    nodes = sorted(edges)
    seen_pairs: set[frozenset] = set()
    for a in nodes:
        for b in reachable(a):
            if a == b or frozenset((a, b)) in seen_pairs:
                continue
            if a in reachable(b):
                seen_pairs.add(frozenset((a, b)))
                ha, hb = _rankable_head(kb, a), _rankable_head(kb, b)
                if ha is not None and hb is not None and complementary_unifiable(ha, hb):
                    entries.append(
                        ValidationEntry(
                            "warning",
                            "priority-cycle",
                            f"labels {a} and {b} rank above each other; treated as no-priority at query time",
                            tuple(sorted((a, b))),
                        )
                    )

    # layer order: a body predicate should not be derivable only above the rule
    derivable_ranks: dict[tuple[str, int, bool], set[int]] = {}
    for rule in kb.rules.values():
        derivable_ranks.setdefault(rule.head.sign_key, set()).add(rule.layer.rank)
    for fact in kb.iter_facts():
        derivable_ranks.setdefault(fact.literal.sign_key, set()).add(fact.layer.rank)
    for pred, arity in kb.abducibles:
        derivable_ranks.setdefault((pred, arity, True), set()).add(0)
    for rule in sorted(kb.rules.values(), key=lambda r: r.id):
        for cond in rule.body:
            if not isinstance(cond, Literal):
                continue
            ranks = derivable_ranks.get(cond.sign_key)
            if ranks and min(ranks) > rule.layer.rank:
                entries.append(
                    ValidationEntry(
                        "warning",
                        "layer-order",
                        f"rule {rule.id} ({rule.layer.value}) consumes {cond.predicate}/{cond.arity}, "
                        "only derivable in a higher layer",
                        (rule.id, cond.predicate),
                    )
                )

    used: set[tuple[str, int]] = set()
    for rule in kb.rules.values():
        for cond in rule.body:
            if isinstance(cond, Literal):
                used.add((cond.predicate, cond.arity))
    for pred, arity in sorted(kb.abducibles):
        if (pred, arity) not in used:
            entries.append(
                ValidationEntry(
                    "info",
                    "unused-abducible",
                    f"abducible {pred}/{arity} appears in no rule body",
                    (pred,),
                )
            )

    return ValidationReport(tuple(entries))
