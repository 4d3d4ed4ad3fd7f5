"""Command line front end.

Exit codes: 0 success, 1 bad input files or failed expectations,
2 unparsable goal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .argumentation import AcceptanceStatus, query
from .corpus import SCENARIOS, check_expectations, load_corpus
from .dsl import ParseError, parse_program, parse_query, program_to_kb
from .explanation import to_dot, to_json, to_text
from .inference import ReasonerConfig, missing_evidence_hints
from .kb import KnowledgeBase, validate_kb
from .terms import Layer


def _load_files(
    paths: Sequence[str],
    base: KnowledgeBase,
    provenance: str,
) -> tuple[KnowledgeBase, int]:
    """Fold .abr files into base, printing parse errors. Returns error count."""
    kb = base
    bad = 0
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            print(f"{path}: {err}", file=sys.stderr)
            bad += 1
            continue
        program = parse_program(text)
        for err in program.errors:
            print(f"{path}:{err.line}:{err.col}: {err.message}", file=sys.stderr)
        bad += len(program.errors)
        kb = program_to_kb(program, base=kb, provenance=provenance,
                           fact_layer=Layer.TECHNICAL)
    return kb, bad


def _cmd_check(args: argparse.Namespace) -> int:
    kb, bad = _load_files(args.files, KnowledgeBase.empty(), "evidence")
    report = validate_kb(kb)
    for line in report.errors:
        print(f"error: {line}", file=sys.stderr)
    for line in report.warnings:
        print(f"warning: {line}", file=sys.stderr)
    for line in report.infos:
        print(f"info: {line}")
    if bad or report.errors:
        return 1
    print(f"ok: {len(kb.rules)} rules, {len(kb.preferences)} preferences, "
          f"{len(kb.facts)} facts")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    try:
        goal = parse_query(args.goal)
    except ParseError as err:
        print(f"goal: {err}", file=sys.stderr)
        return 2

    if args.kb:
        kb, bad = _load_files(args.kb, KnowledgeBase.empty(), "background")
    else:
        kb, bad = load_corpus(), 0
    kb, bad_ev = _load_files(args.evidence, kb, "evidence")
    if bad or bad_ev:
        return 1

    config = ReasonerConfig(max_depth=args.max_depth, hint_bound=args.hints)
    answers = query(kb, goal, config)
    hints = []
    if not any(a.status is AcceptanceStatus.SCEPTICAL for a in answers):
        hints = missing_evidence_hints(kb, goal, config=config)

    if args.format == "json":
        doc = {
            "goal": str(goal),
            "answers": [to_json(kb, a, goal=goal) for a in answers],
            "hints": [h.to_dict() for h in hints],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    elif args.format == "dot":
        for a in answers:
            print(to_dot(kb, a))
        if not answers:
            print("% no answers", file=sys.stderr)
    else:
        if not answers:
            print("no answers.")
        for i, a in enumerate(answers):
            if i:
                print()
            print(to_text(kb, a, goal=goal))
        for h in hints:
            what = ", ".join(str(m) for m in h.missing)
            print(f"hint [{h.kind} via {h.enabling_rule}]: {what} "
                  f"-> {h.would_conclude}")
    return 0


def _cmd_scenario(args: argparse.Namespace) -> int:
    ok, lines = check_expectations(args.name)
    for line in lines:
        print(line)
    if args.expect:
        return 0 if ok else 1
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir=args.state), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abr",
        description="Argumentation-based attribution reasoner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate rule files")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    p_check.set_defaults(func=_cmd_check)

    p_query = sub.add_parser("query", help="evaluate a goal")
    p_query.add_argument("-k", "--kb", action="append", default=[],
                         metavar="FILE", help="rule/background file "
                         "(default: bundled corpus)")
    p_query.add_argument("-e", "--evidence", action="append", default=[],
                         metavar="FILE", help="evidence fact file")
    p_query.add_argument("--max-depth", type=int,
                         default=ReasonerConfig().max_depth)
    p_query.add_argument("--hints", type=int, metavar="B",
                         default=ReasonerConfig().hint_bound,
                         help="return at most B hints")
    p_query.add_argument("--format", choices=("text", "json", "dot"),
                         default="text")
    p_query.add_argument("goal")
    p_query.set_defaults(func=_cmd_query)

    p_scen = sub.add_parser("scenario", help="run a bundled case")
    p_scen.add_argument("name", choices=SCENARIOS)
    p_scen.add_argument("--expect", action="store_true",
                        help="exit nonzero unless expectations hold")
    p_scen.set_defaults(func=_cmd_scenario)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--state", metavar="DIR", default=None,
                         help="session persistence directory "
                         "(or env ABR_STATE_DIR)")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
