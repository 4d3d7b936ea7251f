"""Command-line interface.

    creoletag generate --sem spec.json [--lan MQ] [--grammar g.fstag]
    creoletag tables np|tma [--golden file.tsv]
    creoletag specialize --lan HT -o ht.fstag
    creoletag check grammar.fstag
    creoletag recognize --goal NP "sé tab la"

All output is UTF-8 and deterministic: identical inputs produce
byte-identical output.  Exit codes: 0 success, 1 no result / mismatch,
2 validation findings, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .creole import default_grammar
from .dsl import load_grammar, serialize
from .errors import (CreoleTagError, GrammarSyntaxError, InvalidSpec,
                     MissingCell, NoAnalysis, NoRealization, ValidationError)
from .generate import format_table, generate, semspec_from_json, table_np, \
    table_tma
from .recognize import recognize
from .specialize import specialize

EXIT_OK = 0
EXIT_NO_RESULT = 1
EXIT_FINDINGS = 2
EXIT_BAD_INPUT = 3


def _load(path):
    if path:
        with open(path, encoding="utf-8") as handle:
            return load_grammar(handle.read())
    return default_grammar()


def _lan_key(grammar):
    order = {code: i for i, code in enumerate(
        grammar.schema.domain("lan").values)}
    return lambda code: order.get(code, 99)


def cmd_generate(args):
    grammar = _load(args.grammar)
    try:
        with open(args.sem, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print("cannot read semantic input: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    spec = semspec_from_json(data)
    if args.lan:
        requested = frozenset(args.lan.split(","))
        spec = replace(spec,
                       lan=(spec.lan & requested if spec.lan else requested))
    try:
        realizations = generate(grammar, spec)
    except NoRealization as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO_RESULT
    key = _lan_key(grammar) if "lan" in grammar.schema else None
    for real in realizations:
        lan = ",".join(sorted(real.lan_set, key=key)) if key else "-"
        line = "%s\t%s" % (" ".join(real.tokens), lan)
        if real.alternatives:
            line += "\t" + " / ".join(" ".join(alt)
                                      for alt in real.alternatives)
        print(line)
    return EXIT_OK


def cmd_tables(args):
    if args.which not in ("np", "tma"):
        print("unknown table %r (expected np or tma)" % args.which,
              file=sys.stderr)
        return EXIT_BAD_INPUT
    grammar = _load(args.grammar)
    try:
        rows = table_np(grammar) if args.which == "np" else table_tma(grammar)
    except MissingCell as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO_RESULT
    text = format_table(grammar, rows)
    if not args.golden:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.golden, encoding="utf-8") as handle:
            golden = handle.read()
    except OSError as exc:
        print("cannot read golden file: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    if text == golden:
        sys.stdout.write(text)
        return EXIT_OK
    _report_diff(text, golden)
    return EXIT_NO_RESULT


def _report_diff(text, golden):
    ours = text.splitlines()
    theirs = golden.splitlines()
    header = theirs[0].split("\t") if theirs else []
    for i in range(max(len(ours), len(theirs))):
        a = ours[i] if i < len(ours) else ""
        b = theirs[i] if i < len(theirs) else ""
        if a == b:
            continue
        cells_a = a.split("\t")
        cells_b = b.split("\t")
        row = cells_b[0] if len(cells_b) > 0 and cells_b[0] else \
            (cells_a[0] if cells_a else "?")
        for j in range(max(len(cells_a), len(cells_b))):
            va = cells_a[j] if j < len(cells_a) else ""
            vb = cells_b[j] if j < len(cells_b) else ""
            if va != vb:
                dialect = header[j] if j < len(header) else "col%d" % j
                print("mismatch at (%s, %s): got %r, want %r"
                      % (row, dialect, va, vb), file=sys.stderr)


def cmd_specialize(args):
    grammar = _load(args.grammar)
    specialized = specialize(grammar, args.lan)
    text = serialize(specialized)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args):
    try:
        with open(args.file, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print("cannot read grammar: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        load_grammar(text)
    except GrammarSyntaxError as exc:
        print("syntax error: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValidationError as exc:
        for finding in exc.findings:
            print(finding)
        return EXIT_FINDINGS
    print("ok")
    return EXIT_OK


def cmd_recognize(args):
    grammar = _load(args.grammar)
    try:
        analyses = recognize(grammar, args.tokens, args.goal)
    except NoAnalysis as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO_RESULT
    key = _lan_key(grammar) if "lan" in grammar.schema else None

    def codes(s):
        return sorted(s, key=key) if key else sorted(s)

    for analysis in analyses:
        record = {
            "tokens": " ".join(analysis.tokens),
            "goal": analysis.goal,
            "lan_set": codes(analysis.lan_set),
            "per_token_lan": [codes(s) for s in analysis.per_token_lan],
            "mixed": analysis.mixed,
            "features": {attr: codes(cell) if isinstance(cell, frozenset)
                         else str(cell)
                         for attr, cell in analysis.features.items()},
        }
        print(json.dumps(record, ensure_ascii=False, sort_keys=True))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="creoletag",
        description="Multidialectal Creole grammar toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="realize a semantic specification")
    p.add_argument("--sem", required=True, help="JSON semantic input")
    p.add_argument("--lan", help="restrict to dialects (comma separated)")
    p.add_argument("--grammar", help="grammar file (default: embedded)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("tables", help="regenerate a paradigm table")
    p.add_argument("which", help="np or tma")
    p.add_argument("--golden", help="compare byte-for-byte against this file")
    p.add_argument("--grammar", help="grammar file (default: embedded)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("specialize", help="project onto one dialect")
    p.add_argument("--lan", required=True, help="dialect code")
    p.add_argument("-o", "--output", help="output grammar file")
    p.add_argument("--grammar", help="grammar file (default: embedded)")
    p.set_defaults(func=cmd_specialize)

    p = sub.add_parser("check", help="validate a grammar file")
    p.add_argument("file", help="grammar file to validate")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("recognize", help="analyse a surface string")
    p.add_argument("tokens", help="space-separated surface string")
    p.add_argument("--goal", default="NP", help="NP, S, Pred or N")
    p.set_defaults(func=cmd_recognize)
    p.add_argument("--grammar", help="grammar file (default: embedded)")

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidSpec, GrammarSyntaxError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValidationError as exc:
        for finding in exc.findings:
            print(finding, file=sys.stderr)
        return EXIT_FINDINGS
    except CreoleTagError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO_RESULT


if __name__ == "__main__":
    sys.exit(main())
