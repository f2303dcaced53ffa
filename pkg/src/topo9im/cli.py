"""Command line interface.

Subcommands: qualify, infer, query, export, validate, report.
Exit codes: 0 success, 1 usage error, 2 data error (bad manifest,
geometry, rules, or knowledge base), 3 consistency violations found.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import Topo9imError, UsageError
from .kb import KnowledgeBase
from .rules import parse_program, run
from .scene import export, load_scene, qualify_all


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="topo9im",
                     description="Qualitative topology over convex bodies")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("qualify", help="classify all pairs, print the knowledge base")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")

    p = sub.add_parser("infer", help="qualify, then apply a rules program")
    p.add_argument("manifest")
    p.add_argument("rules")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")

    p = sub.add_parser("query", help="answer select queries over a scene or saved KB")
    p.add_argument("source", help="scene manifest or exported KB JSON")
    p.add_argument("queries")

    p = sub.add_parser("export", help="write the KB as json, ntriples, or obj")
    p.add_argument("source", help="scene manifest or exported KB JSON")
    p.add_argument("--format", required=True, choices=("json", "ntriples", "obj"))
    p.add_argument("-o", "--output", help="output path (required for obj)")
    p.add_argument("--focus", help="individual to highlight relations against")
    p.add_argument("--relation", help="relation name for the highlight, e.g. meets")

    p = sub.add_parser("validate", help="check a scene or saved KB against the property semantics")
    p.add_argument("source", help="scene manifest or exported KB JSON")

    p = sub.add_parser("report", help="write relations.tsv and figures to a directory")
    p.add_argument("manifest")
    p.add_argument("-o", "--outdir", default="report")

    return parser


def _is_manifest(path: Path) -> bool:
    """A manifest has an 'entries' list; a saved KB has 'triples'."""
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise Topo9imError(f"{path}: not valid JSON: {exc}") from exc
    return isinstance(doc, dict) and "entries" in doc


def _load_source(path_str: str, qualify: bool):
    """Scene manifest -> (qualified) KB plus registry; KB JSON -> as saved."""
    path = Path(path_str)
    if _is_manifest(path):
        kb, registry = load_scene(path)
        if qualify:
            qualify_all(kb, registry)
        return kb, registry
    return KnowledgeBase.from_json(path.read_text()), {}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_qualify(args) -> int:
    kb, registry = load_scene(args.manifest)
    qualify_all(kb, registry)
    _emit(kb.to_json(), args.output)
    return 0


def _cmd_infer(args) -> int:
    kb, registry = load_scene(args.manifest)
    qualify_all(kb, registry)
    program = parse_program(Path(args.rules).read_text())
    result = run(kb, registry, program)
    _emit(result.kb.to_json(), args.output)
    if result.queries:
        stream = sys.stdout if args.output else sys.stderr
        for q in result.queries:
            stream.write(q.to_tsv())
    return 0


def _cmd_query(args) -> int:
    kb, registry = _load_source(args.source, qualify=True)
    program = parse_program(Path(args.queries).read_text())
    result = run(kb, registry, program)
    for i, q in enumerate(result.queries):
        if i:
            sys.stdout.write("\n")
        sys.stdout.write(q.to_tsv())
    return 0


def _cmd_export(args) -> int:
    needs_geometry = args.format == "obj"
    kb, registry = _load_source(args.source, qualify=True)
    if needs_geometry and not registry:
        raise UsageError("obj export needs a scene manifest with geometry")
    if args.output is None:
        if needs_geometry:
            raise UsageError("obj export needs -o/--output")
        if args.focus or args.relation:
            raise UsageError("--focus/--relation only apply to obj export")
        sys.stdout.write(kb.to_json() if args.format == "json" else kb.to_ntriples())
        return 0
    export(kb, registry, args.format, args.output,
           focus=args.focus, relation=args.relation)
    return 0


def _cmd_validate(args) -> int:
    kb, registry = _load_source(args.source, qualify=True)
    violations = kb.check_consistency()
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        print(f"{len(violations)} violation(s) found", file=sys.stderr)
        return 3
    print(f"ok: {len(kb.triples)} triples, no violations")
    return 0


def _cmd_report(args) -> int:
    from .report import write_report

    kb, registry = load_scene(args.manifest)
    qualify_all(kb, registry)
    for path in write_report(kb, registry, args.outdir):
        print(path)
    return 0


_COMMANDS = {
    "qualify": _cmd_qualify,
    "infer": _cmd_infer,
    "query": _cmd_query,
    "export": _cmd_export,
    "validate": _cmd_validate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required (see --help)")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (Topo9imError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
