"""Render query answers as analyst text, a dot graph, and a JSON document.

All three renderings walk the argument tree in pre-order, so node numbering
and line order are stable for identical answers. The JSON document can be
turned back into an argument tree (minus the recorded rule groundings) and
re-checked against a snapshot with validate_tree.
"""

from __future__ import annotations

import itertools
import json
from typing import Optional, Sequence

from .argumentation import AttackRecord, QueryAnswer
from .dsl import parse_query
from .inference import (
    ArgumentTree,
    BuiltinLeaf,
    FactLeaf,
    HypothesisLeaf,
    MissingEvidenceHint,
    RuleApp,
    iter_nodes,
)
from .kb import DateApplicable, KnowledgeBase, NotEqual
from .terms import Literal

SCHEMA = "abr-explanation/1"


def _layer_of(kb: KnowledgeBase, label: str) -> str:
    rule = kb.rules.get(label)
    if rule is not None:
        return rule.layer.value
    fact = kb.fact_by_id(label)
    if fact is not None:
        return fact.layer.value
    return "?"


def _premise_note(kb: KnowledgeBase, child: ArgumentTree) -> str:
    just = child.justification
    if isinstance(just, FactLeaf):
        return f"{child.root} [fact {just.fact_id}]"
    if isinstance(just, HypothesisLeaf):
        return f"{child.root} [hypothesized]"
    if isinstance(just, BuiltinLeaf):
        return f"{child.root} [holds]"
    return f"{child.root} [by {just.rule_id}]"


def _node_line(kb: KnowledgeBase, node: ArgumentTree) -> str:
    just = node.justification
    if isinstance(just, RuleApp):
        head = f"{just.rule_id}[{_layer_of(kb, just.rule_id)}]: {node.root}"
        if not node.children:
            return head
        premises = ", ".join(_premise_note(kb, child) for child in node.children)
        return f"{head} <- {premises}"
    if isinstance(just, FactLeaf):
        fact = kb.fact_by_id(just.fact_id)
        provenance = fact.provenance if fact is not None else "?"
        return f"{just.fact_id}[{_layer_of(kb, just.fact_id)}]: {node.root} ({provenance})"
    if isinstance(just, HypothesisLeaf):
        return f"[hypothesized] {node.root}"
    return f"builtin: {node.root} holds"


def _attack_line(record: AttackRecord) -> str:
    line = f"{record.counter.root} vs {record.attacked}: {record.verdict.value}"
    if record.preferences:
        line += f" (prefers: {', '.join(record.preferences)})"
    return line


def to_text(
    kb: KnowledgeBase,
    answer: QueryAnswer,
    goal: Optional[Literal] = None,
    hints: Sequence[MissingEvidenceHint] = (),
) -> str:
    lines: list[str] = []
    if goal is not None:
        lines.append(f"goal: {goal}")
    for name, value in answer.binding:
        lines.append(f"binding: {name} = {value}")
    lines.append(f"status: {answer.status.value}")
    lines.append("derivation:")
    for node in iter_nodes(answer.argument):
        lines.append(f"  {_node_line(kb, node)}")
    if answer.attack_log:
        lines.append("attacks:")
        for record in answer.attack_log:
            lines.append(f"  {_attack_line(record)}")
    if answer.hypotheses:
        lines.append("hypotheses:")
        for hyp in sorted(answer.hypotheses, key=str):
            lines.append(f"  {hyp}")
    if hints:
        lines.append("hints:")
        for hint in hints:
            missing = ", ".join(str(m) for m in hint.missing)
            via = f" via {hint.enabling_rule}" if hint.enabling_rule else ""
            lines.append(f"  {hint.kind}{via}: {missing} -> would conclude {hint.would_conclude}")
    return "\n".join(lines) + "\n"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(kb: KnowledgeBase, answer: QueryAnswer) -> str:
    """Graphviz rendering; node ids n0.. follow the pre-order walk."""
    out: list[str] = ["digraph explanation {"]
    counter = itertools.count()
    ids: dict[int, str] = {}  # pre-order node position -> dot id of its conclusion

    def emit(node: ArgumentTree, position: list[int]) -> str:
        my_pos = position[0]
        position[0] += 1
        just = node.justification
        nid = f"n{next(counter)}"
        ids[my_pos] = nid
        if isinstance(just, HypothesisLeaf):
            out.append(
                f"  {nid} [shape=ellipse, style=dashed, label={_dot_quote(f'{node.root} (hypothesis)')}];"
            )
            return nid
        if isinstance(just, FactLeaf):
            out.append(
                f"  {nid} [shape=ellipse, label={_dot_quote(f'{node.root}|{just.fact_id}')}];"
            )
            return nid
        if isinstance(just, BuiltinLeaf):
            out.append(f"  {nid} [shape=ellipse, label={_dot_quote(str(node.root))}];")
            return nid
        out.append(f"  {nid} [shape=ellipse, label={_dot_quote(str(node.root))}];")
        box = f"n{next(counter)}"
        layer = _layer_of(kb, just.rule_id)
        out.append(f"  {box} [shape=box, label={_dot_quote(f'{just.rule_id} [{layer}]')}];")
        out.append(f"  {nid} -> {box};")
        for child in node.children:
            child_id = emit(child, position)
            out.append(f"  {box} -> {child_id};")
        return nid

    emit(answer.argument, [0])

    for record in answer.attack_log:
        cid = f"n{next(counter)}"
        out.append(
            f"  {cid} [shape=ellipse, style=bold, label={_dot_quote(f'counter: {record.counter.root}')}];"
        )
        target = ids.get(record.point.in_a, ids[0])
        label = ", ".join(record.preferences) if record.preferences else record.verdict.value
        out.append(f"  {cid} -> {target} [color=red, label={_dot_quote(label)}];")

    out.append("}")
    return "\n".join(out) + "\n"


def _tree_doc(node: ArgumentTree) -> dict:
    just = node.justification
    doc: dict = {"literal": str(node.root)}
    if isinstance(just, RuleApp):
        doc["kind"] = "rule"
        doc["ruleId"] = just.rule_id
    elif isinstance(just, FactLeaf):
        doc["kind"] = "fact"
        doc["ruleId"] = just.fact_id
    elif isinstance(just, HypothesisLeaf):
        doc["kind"] = "hypothesis"
    else:
        doc["kind"] = "builtin"
    doc["children"] = [_tree_doc(child) for child in node.children]
    return doc


def to_json(
    kb: KnowledgeBase,
    answer: QueryAnswer,
    goal: Optional[Literal] = None,
    hints: Sequence[MissingEvidenceHint] = (),
) -> dict:
    return {
        "schema": SCHEMA,
        "goal": str(goal) if goal is not None else str(answer.argument.root),
        "binding": {name: str(value) for name, value in answer.binding},
        "status": answer.status.value,
        "tree": _tree_doc(answer.argument),
        "hypotheses": sorted(str(h) for h in answer.hypotheses),
        "attacks": [
            {
                "counterRoot": str(record.counter.root),
                "verdict": record.verdict.value,
                "preferences": list(record.preferences),
            }
            for record in answer.attack_log
        ],
        "hints": [hint.to_dict() for hint in hints],
    }


def to_json_text(
    kb: KnowledgeBase,
    answer: QueryAnswer,
    goal: Optional[Literal] = None,
    hints: Sequence[MissingEvidenceHint] = (),
) -> str:
    return json.dumps(to_json(kb, answer, goal, hints), indent=2, sort_keys=True) + "\n"


def tree_from_json(doc: dict) -> ArgumentTree:
    """Rebuild an argument tree from a document (groundings are not restored)."""
    literal = parse_query(doc["literal"])
    kind = doc["kind"]
    children = tuple(tree_from_json(child) for child in doc.get("children", ()))
    if kind == "rule":
        return ArgumentTree(literal, RuleApp(doc["ruleId"], (), children))
    if children:
        raise ValueError(f"{kind} nodes cannot have children")
    if kind == "fact":
        return ArgumentTree(literal, FactLeaf(doc["ruleId"]))
    if kind == "hypothesis":
        return ArgumentTree(literal, HypothesisLeaf())
    if kind == "builtin":
        atom = literal.atom
        if atom.predicate == "dateApplicable" and len(atom.args) == 2:
            condition = DateApplicable(atom.args[0], atom.args[1])
        elif atom.predicate == "notEqual" and len(atom.args) == 2:
            condition = NotEqual(atom.args[0], atom.args[1])
        else:
            raise ValueError(f"unknown builtin literal: {literal}")
        return ArgumentTree(literal, BuiltinLeaf(condition))
    raise ValueError(f"unknown node kind: {kind!r}")
