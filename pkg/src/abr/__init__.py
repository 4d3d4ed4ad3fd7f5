"""Argumentation-based reasoning for cyber-attack attribution.

The package splits into pure layers: term structures, a rule DSL, a
backward chainer with abduction, a dialectical game over arguments, and
explanation renderers. The corpus subpackage ships a ready rule base
with four replayable cases; service and cli expose the engine over HTTP
and the command line.
"""

from .argumentation import (
    AcceptanceStatus,
    AttackRecord,
    DefeatVerdict,
    GameDepthExceeded,
    QueryAnswer,
    accept,
    decide_defeat,
    find_conflicts,
    query,
    rule_priority,
)
from .dsl import ParseError, parse_program, parse_query, program_to_kb, render_program
from .explanation import to_dot, to_json, to_json_text, to_text, tree_from_json
from .inference import (
    ArgumentTree,
    InstantiationError,
    MissingEvidenceHint,
    ReasonerConfig,
    derive,
    derive_all,
    missing_evidence_hints,
    validate_tree,
)
from .kb import ArgumentRule, Fact, KnowledgeBase, PreferenceRule, validate_kb
from .terms import Atom, Constant, Integer, Layer, ListTerm, Literal, Variable

__version__ = "0.1.0"

__all__ = [
    "AcceptanceStatus",
    "ArgumentRule",
    "ArgumentTree",
    "Atom",
    "AttackRecord",
    "Constant",
    "DefeatVerdict",
    "Fact",
    "GameDepthExceeded",
    "Integer",
    "InstantiationError",
    "KnowledgeBase",
    "Layer",
    "ListTerm",
    "Literal",
    "MissingEvidenceHint",
    "ParseError",
    "PreferenceRule",
    "QueryAnswer",
    "ReasonerConfig",
    "Variable",
    "accept",
    "decide_defeat",
    "derive",
    "derive_all",
    "find_conflicts",
    "missing_evidence_hints",
    "parse_program",
    "parse_query",
    "program_to_kb",
    "query",
    "render_program",
    "rule_priority",
    "to_dot",
    "to_json",
    "to_json_text",
    "to_text",
    "tree_from_json",
    "validate_kb",
    "validate_tree",
    "__version__",
]
