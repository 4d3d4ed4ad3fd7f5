"""Conflict detection, priority-based defeat, and dialectical acceptance.

An argument is attacked wherever any of its node conclusions has a derivable
complement. Defeat between two conflicting nodes is decided by the labels of
the rules applied there: a strict defeat needs a derivable priority one way
and none the other way. Hypothesis nodes carry the pseudo-label `hyp`, which
loses to every rule and fact, so abduced atoms survive only while nothing
derives their complement.

Acceptance is a two-player game. The opponent may play any counter-argument
the current argument does not strictly defeat at the conflict point; the
proponent must answer each with an argument that strictly defeats the
counter at one of its nodes. Arguments may not repeat within one branch.
A goal instance is sceptical when the proponent wins every branch,
credulous when the argument merely survives mutual attacks, and the caller
reports notSupported when every argument for a binding dies by strict,
unanswered defeat.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .inference import (
    ArgumentTree,
    BuiltinLeaf,
    FactLeaf,
    HypothesisLeaf,
    ReasonerConfig,
    RuleApp,
    apply_condition,
    apply_literal,
    derive,
    derive_all,
    eval_builtin,
    hypotheses_of,
    is_builtin,
    iter_nodes,
    DEFAULT_CONFIG,
    InstantiationError,
)
from .kb import KnowledgeBase
from .terms import Layer, Literal, Term, variables_of
from .unification import Substitution, apply

HYP_LABEL = "hyp"


class DefeatVerdict(Enum):
    A_STRICTLY_DEFEATS_B = "aStrictlyDefeatsB"
    B_STRICTLY_DEFEATS_A = "bStrictlyDefeatsA"
    MUTUAL_ATTACK = "mutualAttack"


class AcceptanceStatus(Enum):
    SCEPTICAL = "sceptical"
    CREDULOUS = "credulous"
    NOT_SUPPORTED = "notSupported"


@dataclass(frozen=True)
class ConflictPoint:
    """Node indexes are positions in the pre-order walk of each tree."""

    in_a: int
    in_b: int
    literal: Literal


@dataclass(frozen=True)
class AttackRecord:
    attacked: Literal  # conclusion of the node under attack
    counter: ArgumentTree
    point: ConflictPoint
    verdict: DefeatVerdict
    preferences: tuple[str, ...]


@dataclass(frozen=True)
class QueryAnswer:
    binding: tuple[tuple[str, Term], ...]
    status: AcceptanceStatus
    argument: ArgumentTree
    hypotheses: frozenset[Literal]
    attack_log: tuple[AttackRecord, ...]

    def binding_dict(self) -> dict[str, Term]:
        return dict(self.binding)


def node_label(node: ArgumentTree) -> str:
    just = node.justification
    if isinstance(just, RuleApp):
        return just.rule_id
    if isinstance(just, FactLeaf):
        return just.fact_id
    if isinstance(just, HypothesisLeaf):
        return HYP_LABEL
    raise ValueError(f"builtin nodes take part in no conflicts: {node.root}")


def _no_abduction(config: ReasonerConfig) -> ReasonerConfig:
    return ReasonerConfig(
        max_depth=config.max_depth,
        abduction=False,
        diagnostics=config.diagnostics,
    )


def _body_holds(kb: KnowledgeBase, body, config: ReasonerConfig) -> bool:
    """One solution of a preference-rule body, abduction off."""
    probe = _no_abduction(config)

    def step(i: int, subst: Substitution) -> bool:
        if i == len(body):
            return True
        cond = body[i]
        if is_builtin(cond):
            try:
                ok = eval_builtin(apply_condition(cond, subst))
            except InstantiationError:
                return False
            return ok and step(i + 1, subst)
        applied = apply_literal(cond, subst)
        free = set(variables_of(applied))
        tried: set[tuple] = set()
        for s_inner, _ in derive(kb, applied, probe):
            outcome = tuple(sorted((str(v), str(apply(v, s_inner))) for v in free))
            if outcome in tried:
                continue
            tried.add(outcome)
            merged = dict(subst)
            for v in free:
                merged[v] = apply(v, s_inner)
            if step(i + 1, merged):
                return True
        return False

    return step(0, {})


class PriorityOracle:
    """Transitive closure over preference rules whose bodies hold.

    Bodies are evaluated once per snapshot, without abduction and without
    consulting priorities, so the priority relation is a fixed digraph.
    """

    def __init__(self, kb: KnowledgeBase, config: ReasonerConfig):
        self._kb = kb
        self._config = config
        self._edges: Optional[dict[str, list[tuple[str, str]]]] = None
        self._memo: dict[tuple[str, str], Optional[tuple[str, ...]]] = {}

    def edges(self) -> dict[str, list[tuple[str, str]]]:
        if self._edges is None:
            out: dict[str, list[tuple[str, str]]] = {}
            for pref in sorted(self._kb.preferences.values(), key=lambda p: p.id):
                if _body_holds(self._kb, pref.body, self._config):
                    out.setdefault(pref.higher, []).append((pref.lower, pref.id))
            self._edges = out
        return self._edges

    def chain(self, higher: str, lower: str) -> Optional[tuple[str, ...]]:
        """Preference ids of a path higher -> lower, or None."""
        if higher == lower:
            return None  # the relation is irreflexive
        key = (higher, lower)
        if key in self._memo:
            return self._memo[key]
        edges = self.edges()
        back: dict[str, tuple[str, str]] = {}
        queue = deque([higher])
        found = None
        while queue:
            at = queue.popleft()
            for nxt, pid in edges.get(at, ()):
                if nxt in back or nxt == higher:
                    continue
                back[nxt] = (at, pid)
                if nxt == lower:
                    found = nxt
                    queue.clear()
                    break
                queue.append(nxt)
        chain: Optional[tuple[str, ...]] = None
        if found is not None:
            ids = []
            at = lower
            while at != higher:
                prev, pid = back[at]
                ids.append(pid)
                at = prev
            chain = tuple(reversed(ids))
        self._memo[key] = chain
        return chain


def rule_priority(
    kb: KnowledgeBase,
    higher: str,
    lower: str,
    config: Optional[ReasonerConfig] = None,
) -> Optional[tuple[str, ...]]:
    """Preference chain making `higher > lower` derivable, else None."""
    oracle = PriorityOracle(kb, config if config is not None else DEFAULT_CONFIG)
    return oracle.chain(higher, lower)


def _decide(oracle: PriorityOracle, label_a: str, label_b: str) -> tuple[DefeatVerdict, tuple[str, ...]]:
    """Verdict between the attacked node's label (a) and the attacker root's (b)."""
    if label_a == HYP_LABEL and label_b != HYP_LABEL:
        return DefeatVerdict.B_STRICTLY_DEFEATS_A, ()
    if label_b == HYP_LABEL and label_a != HYP_LABEL:
        return DefeatVerdict.A_STRICTLY_DEFEATS_B, ()
    ab = oracle.chain(label_a, label_b)
    ba = oracle.chain(label_b, label_a)
    if ab is not None and ba is None:
        return DefeatVerdict.A_STRICTLY_DEFEATS_B, ab
    if ba is not None and ab is None:
        return DefeatVerdict.B_STRICTLY_DEFEATS_A, ba
    return DefeatVerdict.MUTUAL_ATTACK, ()


def decide_defeat(
    kb: KnowledgeBase,
    a: ArgumentTree,
    b: ArgumentTree,
    point: ConflictPoint,
    config: Optional[ReasonerConfig] = None,
) -> tuple[DefeatVerdict, tuple[str, ...]]:
    config = config if config is not None else DEFAULT_CONFIG
    oracle = PriorityOracle(kb, config)
    nodes_a = list(iter_nodes(a))
    nodes_b = list(iter_nodes(b))
    return _decide(oracle, node_label(nodes_a[point.in_a]), node_label(nodes_b[point.in_b]))


def _hypotheses_compatible(
    kb: KnowledgeBase,
    attacked: ArgumentTree,
    counter: ArgumentTree,
    config: ReasonerConfig,
) -> bool:
    """A counter may not rest on hypotheses the attacked argument's world refutes."""
    counter_hyps = hypotheses_of(counter)
    if not counter_hyps:
        return True
    base_hyps = hypotheses_of(attacked)
    ext = kb
    for h in base_hyps:
        ext = ext.add_fact(h, layer=Layer.BACKGROUND, provenance="background")
    probe = _no_abduction(config)
    for h in counter_hyps:
        if h in base_hyps:
            continue
        for _ in derive(ext, h.complement(), probe):
            return False
    return True


def find_conflicts(
    kb: KnowledgeBase,
    a: ArgumentTree,
    config: Optional[ReasonerConfig] = None,
    memo: Optional[dict] = None,
) -> list[tuple[ArgumentTree, ConflictPoint]]:
    """Counter-arguments concluding the complement of any node of a.

    Counters are derived with abduction enabled; the conflict sits at the
    counter's root (index 0 on its side). Counters built on hypotheses that
    contradict a's own hypothesis set are dropped. memo caches raw counter
    derivations per complement literal; safe to share across arguments of
    one snapshot since derivation is pure.
    """
    config = config if config is not None else DEFAULT_CONFIG
    counter_config = ReasonerConfig(
        max_depth=config.max_depth,
        abduction=True,
        game_depth=config.game_depth,
        hint_bound=config.hint_bound,
        diagnostics=config.diagnostics,
    )
    out: list[tuple[ArgumentTree, ConflictPoint]] = []
    for idx, node in enumerate(iter_nodes(a)):
        if isinstance(node.justification, BuiltinLeaf):
            continue
        target = node.root.complement()
        counters = memo.get(target) if memo is not None else None
        if counters is None:
            try:
                counters = tuple(tree for _, tree in derive_all(kb, target, counter_config))
            except InstantiationError as err:
                config.diag(f"conflict scan skipped {target}: {err}")
                counters = ()
            if memo is not None:
                memo[target] = counters
        for counter in counters:
            if not _hypotheses_compatible(kb, a, counter, config):
                continue
            out.append((counter, ConflictPoint(idx, 0, node.root)))
    return out


_WON = "won"
_LOST_MUTUAL = "lostMutual"
_LOST_STRICT = "lostStrict"


class GameDepthExceeded(Exception):
    pass


class _Evaluator:
    """Shared machinery for one query evaluation over one snapshot."""

    def __init__(self, kb: KnowledgeBase, config: ReasonerConfig,
                 shared: Optional[dict] = None):
        self.kb = kb
        self.config = config
        # pure caches may outlive one evaluation; the attack log never does
        shared = shared if shared is not None else {}
        self.oracle = shared.setdefault("oracle", PriorityOracle(kb, config))
        self._counter_memo: dict = shared.setdefault("counters", {})
        self._conflicts: dict[ArgumentTree, list[tuple[ArgumentTree, ConflictPoint]]] = \
            shared.setdefault("conflicts", {})
        self.log: list[AttackRecord] = []
        self._logged: set[tuple] = set()

    def conflicts(self, tree: ArgumentTree) -> list[tuple[ArgumentTree, ConflictPoint]]:
        if tree not in self._conflicts:
            self._conflicts[tree] = find_conflicts(self.kb, tree, self.config,
                                                   memo=self._counter_memo)
        return self._conflicts[tree]

    def _record(self, attacked_node: Literal, counter: ArgumentTree, point: ConflictPoint,
                verdict: DefeatVerdict, prefs: tuple[str, ...]) -> None:
        key = (attacked_node, counter, point)
        if key in self._logged:
            return
        self._logged.add(key)
        self.log.append(AttackRecord(attacked_node, counter, point, verdict, prefs))

    def moves(self, tree: ArgumentTree, record: bool):
        """(counter, point, verdict, prefs) for every conflict against tree."""
        nodes = list(iter_nodes(tree))
        for counter, point in self.conflicts(tree):
            label_here = node_label(nodes[point.in_a])
            verdict, prefs = _decide(self.oracle, label_here, node_label(counter))
            if record:
                self._record(nodes[point.in_a].root, counter, point, verdict, prefs)
            yield counter, point, verdict, prefs

    def replies(self, counter: ArgumentTree, history: frozenset) -> Iterator[ArgumentTree]:
        """Proponent answers: arguments strictly defeating the counter somewhere."""
        nodes = list(iter_nodes(counter))
        for reply, point in self.conflicts(counter):
            if reply in history:
                continue
            label_attacked = node_label(nodes[point.in_a])
            verdict, _ = _decide(self.oracle, label_attacked, node_label(reply))
            if verdict is DefeatVerdict.B_STRICTLY_DEFEATS_A:
                yield reply

    def defended(self, tree: ArgumentTree, history: frozenset, depth: int, record: bool) -> bool:
        if depth <= 0:
            raise GameDepthExceeded()
        for counter, point, verdict, prefs in self.moves(tree, record):
            if verdict is DefeatVerdict.A_STRICTLY_DEFEATS_B:
                continue  # the counter is pre-empted at its conflict point
            if counter in history:
                continue  # repeats are not legal moves on this branch
            branch = history | {counter}
            if not any(
                self.defended(reply, branch | {reply}, depth - 1, False)
                for reply in self.replies(counter, branch)
            ):
                return False
        return True

    def outcome(self, tree: ArgumentTree) -> str:
        base = frozenset([tree])
        try:
            if self.defended(tree, base, self.config.game_depth, record=True):
                return _WON
        except GameDepthExceeded:
            self.config.diag(f"game depth exceeded defending {tree.root}; degraded to credulous")
            return _LOST_MUTUAL
        # find how badly it lost: an unanswerable strict defeat kills the argument
        try:
            for counter, point, verdict, prefs in self.moves(tree, False):
                if verdict is not DefeatVerdict.B_STRICTLY_DEFEATS_A:
                    continue
                branch = base | {counter}
                if not any(
                    self.defended(reply, branch | {reply}, self.config.game_depth - 1, False)
                    for reply in self.replies(counter, branch)
                ):
                    return _LOST_STRICT
        except GameDepthExceeded:
            self.config.diag(f"game depth exceeded probing defeat of {tree.root}; degraded to credulous")
        return _LOST_MUTUAL


def accept(
    kb: KnowledgeBase,
    a: ArgumentTree,
    config: Optional[ReasonerConfig] = None,
) -> tuple[AcceptanceStatus, tuple[AttackRecord, ...]]:
    """Game status of one argument: sceptical or credulous (never notSupported)."""
    config = config if config is not None else DEFAULT_CONFIG
    ev = _Evaluator(kb, config)
    outcome = ev.outcome(a)
    status = AcceptanceStatus.SCEPTICAL if outcome == _WON else AcceptanceStatus.CREDULOUS
    return status, tuple(ev.log)


_STATUS_ORDER = {
    AcceptanceStatus.SCEPTICAL: 0,
    AcceptanceStatus.CREDULOUS: 1,
    AcceptanceStatus.NOT_SUPPORTED: 2,
}


def query(
    kb: KnowledgeBase,
    goal: Literal,
    config: Optional[ReasonerConfig] = None,
) -> list[QueryAnswer]:
    """Evaluate every binding of goal, best argument per binding.

    Bindings whose every argument dies by unanswered strict defeat are kept
    with status notSupported so the defeat can still be explained.
    """
    config = config if config is not None else DEFAULT_CONFIG
    answers = derive_all(kb, goal, config)
    grouped: dict[tuple, list[tuple[dict[str, Term], ArgumentTree]]] = {}
    order: list[tuple] = []
    for binding, tree in answers:
        key = tuple(sorted((name, str(value)) for name, value in binding.items()))
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append((binding, tree))

    results: list[QueryAnswer] = []
    shared: dict = {}
    for key in order:
        best: Optional[tuple[int, QueryAnswer]] = None
        for binding, tree in grouped[key]:
            ev = _Evaluator(kb, config, shared)
            outcome = ev.outcome(tree)
            status = {
                _WON: AcceptanceStatus.SCEPTICAL,
                _LOST_MUTUAL: AcceptanceStatus.CREDULOUS,
                _LOST_STRICT: AcceptanceStatus.NOT_SUPPORTED,
            }[outcome]
            answer = QueryAnswer(
                binding=tuple(sorted(binding.items())),
                status=status,
                argument=tree,
                hypotheses=hypotheses_of(tree),
                attack_log=tuple(ev.log),
            )
            rank = _STATUS_ORDER[status]
            if best is None or rank < best[0]:
                best = (rank, answer)
            if rank == 0:
                break
        assert best is not None
        results.append(best[1])

    results.sort(key=lambda ans: _STATUS_ORDER[ans.status])
    return results
