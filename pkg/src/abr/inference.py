"""Backward-chaining derivation with abduction, producing argument trees.

The solver is a depth-first, left-to-right backward chainer:

- candidates for a goal are tried in deterministic order, rules sorted by
  id, then facts in insertion order;
- a goal that repeats on its own ancestor chain is pruned (loop check),
  which exactly excludes trees with a repeated literal on a root-to-leaf
  path; the depth bound prunes everything else (growing-term loops);
- abducible goals are hypothesized only as a last resort: the goal must be
  underivable, ground, and its complement underivable without abduction.

Trees are built with whatever variables are still free mid-search and
reified against the final substitution before being yielded, so every
yielded node is ground.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .kb import (
    ArgumentRule,
    BodyCondition,
    DateApplicable,
    KnowledgeBase,
    NotEqual,
)
from .terms import Atom, Integer, ListTerm, Literal, Term, Variable, is_ground, variables_of
from .unification import Substitution, apply, apply_literal, unify_literals


class InstantiationError(Exception):
    """A built-in or abducible goal was reached with unbound or malformed arguments."""


@dataclass
class ReasonerConfig:
    max_depth: int = 32
    abduction: bool = True
    game_depth: int = 64
    hint_bound: int = 10
    diagnostics: Optional[list[str]] = None

    def diag(self, message: str) -> None:
        if self.diagnostics is not None:
            self.diagnostics.append(message)


DEFAULT_CONFIG = ReasonerConfig()


# ---- argument trees ---------------------------------------------------


@dataclass(frozen=True)
class FactLeaf:
    fact_id: str


@dataclass(frozen=True)
class HypothesisLeaf:
    """Marks an abduced ground atom; the node root is the atom itself."""


@dataclass(frozen=True)
class BuiltinLeaf:
    condition: BodyCondition


@dataclass(frozen=True)
class RuleApp:
    rule_id: str
    substitution: tuple[tuple[str, Term], ...]
    children: tuple["ArgumentTree", ...]


Justification = Union[FactLeaf, HypothesisLeaf, BuiltinLeaf, RuleApp]


@dataclass(frozen=True)
class ArgumentTree:
    root: Literal
    justification: Justification

    @property
    def children(self) -> tuple["ArgumentTree", ...]:
        just = self.justification
        return just.children if isinstance(just, RuleApp) else ()

    def __str__(self) -> str:
        return f"<{self.root} by {type(self.justification).__name__}>"


def iter_nodes(tree: ArgumentTree) -> Iterator[ArgumentTree]:
    """Pre-order walk; defines the stable node numbering used everywhere."""
    yield tree
    for child in tree.children:
        yield from iter_nodes(child)


def support_rules(tree: ArgumentTree) -> frozenset[str]:
    """Rule ids and fact ids cited anywhere in the tree (facts are rules too)."""
    out: set[str] = set()
    for node in iter_nodes(tree):
        just = node.justification
        if isinstance(just, RuleApp):
            out.add(just.rule_id)
        elif isinstance(just, FactLeaf):
            out.add(just.fact_id)
    return frozenset(out)


def hypotheses_of(tree: ArgumentTree) -> frozenset[Literal]:
    return frozenset(
        node.root for node in iter_nodes(tree) if isinstance(node.justification, HypothesisLeaf)
    )


def tree_height(tree: ArgumentTree) -> int:
    if not tree.children:
        return 1
    return 1 + max(tree_height(c) for c in tree.children)


def _builtin_literal(cond: BodyCondition) -> Literal:
    if isinstance(cond, DateApplicable):
        return Literal(Atom("dateApplicable", (cond.left, cond.right)))
    assert isinstance(cond, NotEqual)
    return Literal(Atom("notEqual", (cond.left, cond.right)))


# ---- built-in evaluation ----------------------------------------------


def _months(term: Term, origin: str) -> int:
    if not (isinstance(term, ListTerm) and len(term.items) == 2):
        raise InstantiationError(f"{origin}: date must be a [Year, Month] list, got {term}")
    year, month = term.items
    if not (isinstance(year, Integer) and isinstance(month, Integer)):
        raise InstantiationError(f"{origin}: date fields must be integers, got {term}")
    if not 1 <= month.value <= 12:
        raise InstantiationError(f"{origin}: month out of range in {term}")
    return year.value * 12 + month.value


def eval_builtin(cond: BodyCondition) -> bool:
    """Evaluate a ground built-in condition.

    NotEqual is structural difference. DateApplicable([Y1,M1],[Y2,M2]) holds
    iff 0 <= (Y1-Y2)*12 + (M1-M2) < 12: the left date falls within the year
    starting at the right date. Non-ground or malformed input raises
    InstantiationError.
    """
    if isinstance(cond, NotEqual):
        if not (is_ground(cond.left) and is_ground(cond.right)):
            raise InstantiationError(f"'!=' needs ground arguments: {cond}")
        return cond.left != cond.right
    if isinstance(cond, DateApplicable):
        if not (is_ground(cond.left) and is_ground(cond.right)):
            raise InstantiationError(f"dateApplicable needs ground arguments: {cond}")
        delta = _months(cond.left, "dateApplicable") - _months(cond.right, "dateApplicable")
        return 0 <= delta < 12
    raise InstantiationError(f"not a built-in condition: {cond}")


def apply_condition(cond: BodyCondition, subst: Substitution) -> BodyCondition:
    if isinstance(cond, Literal):
        return apply_literal(cond, subst)
    if isinstance(cond, NotEqual):
        return NotEqual(apply(cond.left, subst), apply(cond.right, subst))
    return DateApplicable(apply(cond.left, subst), apply(cond.right, subst))


def is_builtin(cond: BodyCondition) -> bool:
    return isinstance(cond, (NotEqual, DateApplicable))


# ---- rule renaming -----------------------------------------------------


def _rename_term(term: Term, bump: int) -> Term:
    if isinstance(term, Variable):
        return Variable(term.name, bump)
    if isinstance(term, ListTerm):
        return ListTerm(tuple(_rename_term(t, bump) for t in term.items))
    return term


def _rename_literal(lit: Literal, bump: int) -> Literal:
    return Literal(
        Atom(lit.atom.predicate, tuple(_rename_term(a, bump) for a in lit.atom.args)),
        lit.positive,
    )


def _rename_condition(cond: BodyCondition, bump: int) -> BodyCondition:
    if isinstance(cond, Literal):
        return _rename_literal(cond, bump)
    if isinstance(cond, NotEqual):
        return NotEqual(_rename_term(cond.left, bump), _rename_term(cond.right, bump))
    return DateApplicable(_rename_term(cond.left, bump), _rename_term(cond.right, bump))


def rename_rule(rule: ArgumentRule, bump: int) -> tuple[Literal, tuple[BodyCondition, ...]]:
    head = _rename_literal(rule.head, bump)
    return head, tuple(_rename_condition(c, bump) for c in rule.body)


def _condition_vars(cond: BodyCondition) -> Iterator[Variable]:
    if isinstance(cond, Literal):
        yield from variables_of(cond)
    else:
        yield from variables_of(cond.left)
        yield from variables_of(cond.right)


def _rule_var_order(rule: ArgumentRule) -> list[Variable]:
    seen: dict[Variable, None] = {}
    for v in variables_of(rule.head):
        seen.setdefault(v)
    for cond in rule.body:
        for v in _condition_vars(cond):
            seen.setdefault(v)
    return list(seen)


# ---- reification -------------------------------------------------------


def _reify(tree: ArgumentTree, subst: Substitution) -> ArgumentTree:
    root = apply_literal(tree.root, subst)
    just = tree.justification
    if isinstance(just, RuleApp):
        just = RuleApp(
            just.rule_id,
            tuple((name, apply(term, subst)) for name, term in just.substitution),
            tuple(_reify(c, subst) for c in just.children),
        )
    elif isinstance(just, BuiltinLeaf):
        just = BuiltinLeaf(apply_condition(just.condition, subst))
    return ArgumentTree(root, just)


# ---- the solver --------------------------------------------------------


def derive(
    kb: KnowledgeBase,
    goal: Literal,
    config: Optional[ReasonerConfig] = None,
) -> Iterator[tuple[Substitution, ArgumentTree]]:
    """Stream (substitution, argument tree) pairs proving goal.

    Lazy; consuming only the first answer does only the work for it.
    Trees in the stream are fully reified (ground).
    """
    config = config if config is not None else DEFAULT_CONFIG
    counter = itertools.count(1)

    def solve(
        goal_lit: Literal,
        subst: Substitution,
        budget: int,
        ancestors: tuple[Literal, ...],
    ) -> Iterator[tuple[Substitution, ArgumentTree]]:
        current = apply_literal(goal_lit, subst)
        for anc in ancestors:
            if apply_literal(anc, subst) == current:
                return  # goal repeats on its own ancestor chain
        if budget <= 0:
            config.diag(f"depth bound reached at {current}")
            return
        produced = False
        next_ancestors = ancestors + (goal_lit,)
        for rule in kb.rules_for(current.sign_key):
            bump = next(counter)
            head, body = rename_rule(rule, bump)
            s_head = unify_literals(head, current, subst)
            if s_head is None:
                continue
            rule_vars = _rule_var_order(rule)
            for s_final, children in solve_body(body, 0, s_head, budget - 1, next_ancestors, []):
                produced = True
                grounding = tuple(
                    (v.name, apply(Variable(v.name, bump), s_final)) for v in rule_vars
                )
                node = ArgumentTree(
                    apply_literal(head, s_final),
                    RuleApp(rule.id, grounding, tuple(children)),
                )
                yield s_final, node
        for fact in kb.facts_for(current.sign_key):
            s_fact = unify_literals(fact.literal, current, subst)
            if s_fact is None:
                continue
            produced = True
            yield s_fact, ArgumentTree(fact.literal, FactLeaf(fact.id))
        if (
            config.abduction
            and not produced
            and current.positive
            and kb.is_abducible(current.predicate, current.arity)
        ):
            if not is_ground(current):
                raise InstantiationError(f"abducible goal must be ground: {current}")
            if not _derivable_without_abduction(kb, current.complement(), config):
                yield subst, ArgumentTree(current, HypothesisLeaf())

    def solve_body(
        conds: tuple[BodyCondition, ...],
        i: int,
        subst: Substitution,
        budget: int,
        ancestors: tuple[Literal, ...],
        children: list[ArgumentTree],
    ) -> Iterator[tuple[Substitution, list[ArgumentTree]]]:
        if i == len(conds):
            yield subst, list(children)
            return
        cond = conds[i]
        if is_builtin(cond):
            if budget <= 0:
                config.diag(f"depth bound reached at {cond}")
                return
            ground_cond = apply_condition(cond, subst)
            if eval_builtin(ground_cond):
                node = ArgumentTree(_builtin_literal(ground_cond), BuiltinLeaf(ground_cond))
                children.append(node)
                yield from solve_body(conds, i + 1, subst, budget, ancestors, children)
                children.pop()
            return
        for s_next, tree in solve(cond, subst, budget, ancestors):
            children.append(tree)
            yield from solve_body(conds, i + 1, s_next, budget, ancestors, children)
            children.pop()

    for s_final, tree in solve(goal, {}, config.max_depth, ()):
        yield s_final, _reify(tree, s_final)


def _derivable_without_abduction(kb: KnowledgeBase, goal: Literal, config: ReasonerConfig) -> bool:
    probe_config = ReasonerConfig(
        max_depth=config.max_depth,
        abduction=False,
        diagnostics=config.diagnostics,
    )
    for _ in derive(kb, goal, probe_config):
        return True
    return False


def restrict_to_goal(goal: Literal, subst: Substitution) -> dict[str, Term]:
    """Project a solver substitution onto the goal's own variables."""
    return {v.name: apply(v, subst) for v in dict.fromkeys(variables_of(goal))}


def derive_all(
    kb: KnowledgeBase,
    goal: Literal,
    config: Optional[ReasonerConfig] = None,
) -> list[tuple[dict[str, Term], ArgumentTree]]:
    """Collect the stream, deduplicating by goal binding + support set."""
    out: list[tuple[dict[str, Term], ArgumentTree]] = []
    seen: set[tuple] = set()
    for subst, tree in derive(kb, goal, config):
        binding = restrict_to_goal(goal, subst)
        key = (tuple(sorted(binding.items())), support_rules(tree))
        if key in seen:
            continue
        seen.add(key)
        out.append((binding, tree))
    return out


# ---- tree re-validation -------------------------------------------------


def validate_tree(kb: KnowledgeBase, tree: ArgumentTree, config: Optional[ReasonerConfig] = None) -> bool:
    """Check a tree is a sound derivation from this snapshot.

    Used by tests and by explanation round-trips. Raises ValueError with the
    offending node on failure, returns True otherwise.
    """
    config = config if config is not None else DEFAULT_CONFIG

    def check(node: ArgumentTree) -> None:
        if not is_ground(node.root):
            raise ValueError(f"non-ground node root: {node.root}")
        just = node.justification
        if isinstance(just, FactLeaf):
            fact = kb.fact_by_id(just.fact_id)
            if fact is None or fact.literal != node.root:
                raise ValueError(f"node cites fact {just.fact_id} that does not match {node.root}")
            return
        if isinstance(just, HypothesisLeaf):
            if not node.root.positive:
                raise ValueError(f"hypothesis must be a positive atom: {node.root}")
            if not kb.is_abducible(node.root.predicate, node.root.arity):
                raise ValueError(f"hypothesized predicate not abducible: {node.root}")
            if _derivable_without_abduction(kb, node.root.complement(), config):
                raise ValueError(f"hypothesis contradicts the snapshot: {node.root}")
            return
        if isinstance(just, BuiltinLeaf):
            if not eval_builtin(just.condition):
                raise ValueError(f"builtin does not hold: {just.condition}")
            return
        rule = kb.rules.get(just.rule_id)
        if rule is None:
            raise ValueError(f"node cites unknown rule {just.rule_id}")
        head, body = rename_rule(rule, 1)
        subst = unify_literals(head, node.root)
        if subst is None:
            raise ValueError(f"rule {rule.id} head does not match {node.root}")
        if len(body) != len(node.children):
            raise ValueError(f"rule {rule.id} premise count mismatch at {node.root}")
        for cond, child in zip(body, node.children):
            if is_builtin(cond):
                expected = apply_condition(cond, subst)
                if not isinstance(child.justification, BuiltinLeaf):
                    raise ValueError(f"expected builtin child for {cond} at {node.root}")
                if child.justification.condition != expected:
                    raise ValueError(
                        f"builtin child mismatch: {child.justification.condition} vs {expected}"
                    )
            else:
                got = unify_literals(cond, child.root, subst)
                if got is None:
                    raise ValueError(f"child {child.root} does not prove premise {cond} of {rule.id}")
                subst = got
        for child in node.children:
            check(child)

    check(tree)
    return True


# ---- missing-evidence hints ---------------------------------------------


@dataclass(frozen=True)
class MissingEvidenceHint:
    kind: str  # "hypothesis" | "missingPremise"
    enabling_rule: str
    missing: tuple[Literal, ...]
    would_conclude: Literal

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "enablingRule": self.enabling_rule,
            "missing": [str(m) for m in self.missing],
            "wouldConclude": str(self.would_conclude),
        }


def _first_hypothesis_parent(tree: ArgumentTree) -> Optional[str]:
    def walk(node: ArgumentTree) -> Optional[str]:
        just = node.justification
        if isinstance(just, RuleApp):
            for child in just.children:
                if isinstance(child.justification, HypothesisLeaf):
                    return just.rule_id
            for child in just.children:
                found = walk(child)
                if found is not None:
                    return found
        return None

    return walk(tree)


def _canonical_text(lit: Literal) -> str:
    """Literal text with variables numbered by first occurrence, for dedup keys."""
    names: dict[Variable, str] = {}

    def term_text(t: Term) -> str:
        if isinstance(t, Variable):
            if t not in names:
                names[t] = f"V{len(names)}"
            return names[t]
        if isinstance(t, ListTerm):
            return "[" + ", ".join(term_text(x) for x in t.items) + "]"
        return str(t)

    args = ", ".join(term_text(a) for a in lit.atom.args)
    body = lit.atom.predicate if not args else f"{lit.atom.predicate}({args})"
    return body if lit.positive else f"neg {body}"


def _friendly(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Strip rename indexes from free variables for user-facing hint text."""
    mapping: Substitution = {}
    taken: set[str] = set()
    done: set[Variable] = set()
    for lit in literals:
        for v in variables_of(lit):
            if v in done:
                continue
            done.add(v)
            name = v.name
            k = 2
            while name in taken:
                name = f"{v.name}_{k}"
                k += 1
            taken.add(name)
            if name != v.name or v.index != 0:  # identity mapping would loop apply()
                mapping[v] = Variable(name)
    return tuple(apply_literal(lit, mapping) for lit in literals)


def missing_evidence_hints(
    kb: KnowledgeBase,
    goal: Literal,
    bound: Optional[int] = None,
    config: Optional[ReasonerConfig] = None,
) -> list[MissingEvidenceHint]:
    """Suggest evidence that would (help) establish the goal.

    Two passes, first-found rather than exhaustive, capped at bound:

    1. hypothesis sets of abductive derivations of the goal;
    2. rules reachable from the goal by following a single failing premise,
       where every other body condition holds; the failing premise is the
       suggestion. A built-in left non-ground by the gap is presumed
       satisfiable.
    """
    config = config if config is not None else DEFAULT_CONFIG
    if bound is None:
        bound = config.hint_bound
    hints: list[MissingEvidenceHint] = []
    seen: set[tuple] = set()

    def emit(hint: MissingEvidenceHint) -> bool:
        """Record the hint; True only if it was new and there was room."""
        key = (
            hint.kind,
            hint.enabling_rule,
            tuple(_canonical_text(m) for m in hint.missing),
            _canonical_text(hint.would_conclude),
        )
        if key in seen:
            return False
        seen.add(key)
        if len(hints) < bound:
            hints.append(hint)
            return True
        return False

    abductive = ReasonerConfig(
        max_depth=config.max_depth,
        abduction=True,
        diagnostics=config.diagnostics,
    )
    try:
        answers = derive_all(kb, goal, abductive)
    except InstantiationError as err:
        config.diag(f"hint pass skipped a derivation: {err}")
        answers = []
    for _, tree in answers:
        hyps = hypotheses_of(tree)
        if not hyps:
            continue
        parent = _first_hypothesis_parent(tree) or ""
        ordered = tuple(sorted(hyps, key=str))
        emit(MissingEvidenceHint("hypothesis", parent, ordered, tree.root))
        if len(hints) >= bound:
            return hints

    counter = itertools.count(1)

    def one_failure_solutions(
        body: tuple[BodyCondition, ...],
        start: Substitution,
    ) -> Iterator[tuple[BodyCondition, Substitution]]:
        """Assignments satisfying all of body except exactly one literal."""

        def walk(
            i: int, subst: Substitution, skipped: Optional[BodyCondition]
        ) -> Iterator[tuple[BodyCondition, Substitution]]:
            if i == len(body):
                if skipped is not None:
                    yield skipped, subst
                return
            cond = body[i]
            if is_builtin(cond):
                ground_cond = apply_condition(cond, subst)
                try:
                    holds = eval_builtin(ground_cond)
                except InstantiationError:
                    holds = True  # left non-ground by the gap; presume satisfiable
                if holds:
                    yield from walk(i + 1, subst, skipped)
                return
            applied = apply_literal(cond, subst)
            free = set(variables_of(applied))
            tried: set[tuple] = set()
            try:
                for s_inner, _tree in derive(kb, applied, abductive):
                    # keep only bindings of our own free variables; the inner
                    # solver's renamed variables must not leak into this walk,
                    # and distinct trees for one binding add nothing here
                    outcome = tuple(sorted((str(v), str(apply(v, s_inner))) for v in free))
                    if outcome in tried:
                        continue
                    tried.add(outcome)
                    merged = dict(subst)
                    for v in free:
                        merged[v] = apply(v, s_inner)
                    yield from walk(i + 1, merged, skipped)
            except InstantiationError as err:
                config.diag(f"hint probe skipped a premise: {err}")
            if skipped is None:
                yield from walk(i + 1, subst, cond)

        yield from walk(0, start, None)

    def truly_missing(lit: Literal) -> bool:
        try:
            for _ in derive(kb, lit, abductive):
                return False
        except InstantiationError:
            pass
        return True

    def probe(target: Literal, depth: int) -> bool:
        """Emit missingPremise hints for rules one premise short of target.

        Recurses only into freshly emitted gaps, so the walk visits at most
        bound subgoals however cyclic the rule graph is.
        """
        if depth <= 0:
            return True
        for rule in kb.rules_for(target.sign_key):
            head, body = rename_rule(rule, next(counter))
            s_head = unify_literals(head, target)
            if s_head is None:
                continue
            for skipped, s_final in one_failure_solutions(body, s_head):
                missing = apply_condition(skipped, s_final)
                if not isinstance(missing, Literal):
                    continue
                if not truly_missing(missing):
                    continue  # the body does not actually fail there
                conclusion = apply_literal(head, s_final)
                missing, conclusion = _friendly((missing, conclusion))
                if not emit(MissingEvidenceHint("missingPremise", rule.id, (missing,), conclusion)):
                    if len(hints) >= bound:
                        return False
                    continue
                if not probe(missing, depth - 1):
                    return False
        return True

    probe(goal, config.max_depth)
    return hints
