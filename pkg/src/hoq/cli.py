"""Command-line interface: ``hoq <command> ...``.

Exit status is 0 on success (a ``false`` answer is a success), 2 on usage
errors, 3 when a size limit refuses the work and 4 on parse, type or
structure errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formulas
from .check import TypeCheckError, classify, typecheck
from .encoder import BitCode, counts, decode, encode, to_json_value
from .errors import HoqError, LimitExceeded, NormalizationError, StructureError, UnsupportedNode
from .evaluator import Evaluator
from .limits import Limits
from .normalize import normalize, report
from .oracle import equivalent
from .parser import (
    ParseError,
    load_structure,
    load_vocabulary,
    parse_formula,
    print_formula,
    structure_to_dict,
)
from .reduction import plan, reduce_formula, reduce_structure
from .types import TypeSyntaxError, arity_type, format_type, is_arity_type, parse_type

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LIMIT = 3
EXIT_INPUT = 4


class UsageError(Exception):
    pass


def _formula(source: str, vocabulary=None):
    """A formula file path, or the formula text itself when no such file exists."""
    path = Path(source)
    text = path.read_text(encoding="utf-8") if path.is_file() else source
    return parse_formula(text, vocabulary)


def _vocabulary(path):
    return load_vocabulary(path) if path else {}


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _report_lines(d: dict) -> list[str]:
    return [f"{k}: {json.dumps(v, sort_keys=True) if isinstance(v, dict) else v}" for k, v in d.items()]


def cmd_check(args, limits):
    vocab = _vocabulary(args.vocab)
    f = typecheck(_formula(args.formula, vocab), vocab)
    rep = classify(f, vocab).as_dict()
    _emit(args, {"command": "check", "report": rep}, _report_lines(rep))


def cmd_eval(args, limits):
    s = load_structure(args.structure)
    f = typecheck(_formula(args.formula, s.vocabulary), s.vocabulary)
    ev = Evaluator(s, limits)
    value = ev.eval(f)
    stats = ev.stats.as_dict()
    lines = ["true" if value else "false"]
    if args.stats:
        lines += _report_lines(stats)
    _emit(args, {"command": "eval", "value": value, "stats": stats}, lines)


def cmd_normalize(args, limits):
    vocab = _vocabulary(args.vocab)
    f = typecheck(_formula(args.formula, vocab), vocab)
    g = normalize(f, args.form, vocab)
    rep = report(g, f).as_dict()
    text = print_formula(g)
    _emit(args, {"command": "normalize", "form": args.form, "formula": text, "report": rep},
          [text] + _report_lines(rep))


def cmd_count(args, limits):
    t = parse_type(args.type)
    if not is_arity_type(t):
        raise UsageError(f"type {format_type(t)} has mixed arities; counts need a uniform type")
    a = 1 if t.is_iota else t.arity
    rep = counts(t.order, a, args.n, limits).as_dict()
    rep["type"] = format_type(t)
    lines = [f"{k}={rep[k]}" for k in ("N", "B", "C", "T")]
    _emit(args, {"command": "count", "report": rep}, lines)


def cmd_encode(args, limits):
    s = load_structure(args.structure)
    if args.symbol not in s.vocabulary:
        raise UsageError(f"structure has no symbol {args.symbol}")
    t = s.vocabulary[args.symbol]
    code = encode(s[args.symbol], t, s.universe_size, limits)
    _emit(args, {"command": "encode", "symbol": args.symbol, "type": format_type(t),
                 "bits": code.bits, "length": len(code.bits)}, [code.bits])


def cmd_decode(args, limits):
    t = parse_type(args.type)
    v = decode(BitCode(args.bits, t, args.n))
    out = to_json_value(v, t, args.n)
    _emit(args, {"command": "decode", "type": format_type(t), "value": out}, [json.dumps(out)])


def cmd_reduce(args, limits):
    s = load_structure(args.structure)
    f = typecheck(_formula(args.formula, s.vocabulary), s.vocabulary)
    p = plan(s.vocabulary, f, s.universe_size, limits)
    target = reduce_structure(p, s)
    g = reduce_formula(p, f)
    doc = {"command": "reduce", "a": p.a, "target_size": p.target_size,
           "formula": print_formula(g), "structure": structure_to_dict(target)}
    lines = [print_formula(g)]
    if args.output:
        Path(args.output).write_text(json.dumps(doc["structure"]) + "\n", encoding="utf-8")
    else:
        lines.append(json.dumps(doc["structure"]))
    if args.verify:
        source = Evaluator(s, limits).eval(f)
        reduced = Evaluator(target, limits).eval(g)
        doc["verified"] = source == reduced
        lines.append(f"verified: {'true' if source == reduced else 'false'}")
    _emit(args, doc, lines)


def cmd_equiv(args, limits):
    vocab = _vocabulary(args.vocab)
    f = typecheck(_formula(args.left, vocab), vocab)
    g = typecheck(_formula(args.right, vocab), vocab)
    verdict = equivalent(f, g, vocab, args.max_n, limits)
    doc = {"command": "equiv", "equivalent": verdict.equivalent,
           "structures_checked": verdict.structures_checked}
    lines = ["equivalent" if verdict.equivalent else "not equivalent"]
    if verdict.counterexample is not None:
        cx = verdict.counterexample
        doc["counterexample"] = {"structure": structure_to_dict(cx.structure),
                                 "left": cx.left, "right": cx.right}
        lines.append(json.dumps(doc["counterexample"]["structure"]))
        lines.append(f"left: {str(cx.left).lower()}  right: {str(cx.right).lower()}")
    _emit(args, doc, lines)


def cmd_gen(args, limits):
    what = args.predicate
    if what == "card":
        t = parse_type(args.type) if args.type else arity_type(args.arity, args.order)
        pred = formulas.gen_card(args.op, args.k, t)
    elif what in ("0", "1", "max"):
        pred = formulas.gen_const(what)
    elif what in formulas.GENERATORS:
        pred = formulas.GENERATORS[what](args.arity, args.order)
    else:
        raise UsageError(f"unknown predicate {what}")
    text = print_formula(pred.formula)
    free = {k: format_type(t) for k, t in pred.free.items()}
    _emit(args, {"command": "gen", "name": pred.name, "free": free, "formula": text},
          [text, "free: " + ", ".join(f"{k}:{t}" for k, t in free.items())])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoq", description="Higher-order logic over finite structures.")
    parser.add_argument("--json", action="store_true", help="emit one JSON document")
    parser.add_argument("--max-enum", type=int, help="largest enumeration allowed")
    parser.add_argument("--max-code-bits", type=int, help="longest code allowed")
    parser.add_argument("--max-target-universe", type=int, help="largest reduction target allowed")
    parser.add_argument("--jobs", type=int, default=1, help="worker count (work runs in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check and classify a formula")
    p.add_argument("formula")
    p.add_argument("--vocab")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("eval", help="evaluate a formula on a structure")
    p.add_argument("formula")
    p.add_argument("structure")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("normalize", help="rewrite into a normal form")
    p.add_argument("formula")
    p.add_argument("--form", choices=["pnf", "pnf-best", "snf", "anf", "dnf", "full"], default="full")
    p.add_argument("--vocab")
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("count", help="relation counts for a type")
    p.add_argument("--type", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_count)

    p = sub.add_parser("encode", help="bit code of a symbol's interpretation")
    p.add_argument("structure")
    p.add_argument("--symbol", required=True)
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("decode", help="relation of a bit code")
    p.add_argument("--type", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bits", required=True)
    p.set_defaults(run=cmd_decode)

    p = sub.add_parser("reduce", help="order-reduce a formula and structure")
    p.add_argument("formula")
    p.add_argument("structure")
    p.add_argument("--output", help="write the target structure here")
    p.add_argument("--verify", action="store_true", help="evaluate both sides")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("equiv", help="compare two formulas on all small structures")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--vocab")
    p.add_argument("--max-n", type=int, default=2)
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("gen", help="print a generated predicate")
    p.add_argument("predicate", help="eq, lt, lt_tuple, bit, plus, overflow, plus_mod, "
                                     "plus_tuple, card, 0, 1 or max")
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--op", choices=["<=", ">=", "="], default="=")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--type", help="relation type for card")
    p.set_defaults(run=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        limits = Limits.from_env(max_enum=args.max_enum, max_code_bits=args.max_code_bits,
                                 max_target_universe=args.max_target_universe)
        args.run(args, limits)
    except LimitExceeded as exc:
        print(f"hoq: limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, TypeCheckError, TypeSyntaxError, StructureError,
            NormalizationError, UnsupportedNode) as exc:
        print(f"hoq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, OSError, ValueError, TypeError) as exc:
        print(f"hoq: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HoqError as exc:
        print(f"hoq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
