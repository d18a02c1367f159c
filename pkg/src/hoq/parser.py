"""Concrete syntax: formula text, type strings and structure files.

Grammar (ASCII)::

    formula  := iff
    iff      := imp ('<->' imp)*
    imp      := or ('->' imp)?
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '!' unary | ('exists'|'forall') NAME ':' type (',' NAME ':' type)* '.' formula
              | primary
    primary  := '(' formula ')' | 'true' | 'false' | NAME '(' terms ')'
              | term ('=' | '!=' | '=:' type) term | operator | sugar
    term     := NAME | ('bot'|'top') ':' type
    operator := 'TC' '[' binders ';' binders ':' formula ']' '(' terms ';' terms ')'
              | ('PFP'|'IFP') '[' NAME ',' binders ':' formula ']' '(' terms ')'
              | ('NPFP'|'NIFP'|'APFP'|'AIFP') '[' NAME ',' binders ':' formula ';' formula ']'
                '(' terms ')'
    sugar    := 'card' ('<='|'>='|'=') NUM '(' term [':' type] ')'
              | '0' '(' NAME ')' | '1' '(' NAME ')' | 'max' '(' NAME ')'
              | 'if' formula 'then' formula 'else' formula

Binder types in operators may be omitted; they are then taken from the
corresponding argument when its type is known, else ``i``.  Implication,
bi-implication and the sugar forms are expanded while parsing.  The sugar
forms ``0``, ``1`` and ``max`` refer to the order symbol ``lt``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from . import formulas
from .errors import HoqError, StructureError
from .structures import Structure
from .syntax import (
    AFIX_KINDS,
    EXISTS,
    FALSE,
    FIX_KINDS,
    FORALL,
    NFIX_KINDS,
    TRUE,
    AFix,
    And,
    Apply,
    Binder,
    Equal,
    Fix,
    Formula,
    Lit,
    NFix,
    Not,
    Or,
    Quant,
    TC,
    Term,
    Truth,
    iff,
    implies,
    ite,
)
from .types import IOTA, TypeExpr, TypeSyntaxError, format_type, parse_type
from .encoder import to_json_value


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ParseError(HoqError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} ({span})")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUM, OP, EOF
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<NUM>\d+)
  | (?P<OP><->|->|!=|=:|<=|>=|[()\[\],;:.!&|=])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "exists", "forall", "true", "false", "bot", "top", "TC", "card", "max",
    "if", "then", "else", *FIX_KINDS, *NFIX_KINDS, *AFIX_KINDS,
}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if kind != "ws":
            span = SourceSpan(m.start(), m.end(), line, m.start() - line_start + 1)
            tokens.append(Token(kind, m.group(), span))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = m.start() + i + 1
        pos = m.end()
    tokens.append(Token("EOF", "", SourceSpan(len(text), len(text), line, len(text) - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, text: str, vocabulary: Mapping[str, TypeExpr] | None):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.scopes: list[dict[str, TypeExpr | None]] = [dict(vocabulary or {})]
        used = {t.text for t in self.tokens if t.kind == "NAME"}
        self.fresh = formulas.FreshNames(used)

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("OP", "NAME", "NUM") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.span)

    def name(self) -> str:
        if self.tok.kind != "NAME" or self.tok.text in KEYWORDS:
            self.error("expected a name")
        return self.advance().text

    def lookup(self, name: str) -> TypeExpr | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # -- types --
    def type(self) -> TypeExpr:
        start = self.tok
        depth = 0
        parts = []
        while True:
            t = self.tok
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                if depth == 0:
                    break
                depth -= 1
            elif t.text == "i" or t.text == ",":
                if t.text == "," and depth == 0:
                    break
            else:
                break
            parts.append(self.advance().text)
            if depth == 0:
                break
        try:
            return parse_type("".join(parts))
        except TypeSyntaxError as exc:
            raise ParseError(f"bad type: {exc}", start.span) from None

    def try_type(self) -> TypeExpr | None:
        save = self.i
        try:
            return self.type()
        except ParseError:
            self.i = save
            return None

    # -- formulas --
    def formula(self) -> Formula:
        left = self.imp()
        while self.at("<->"):
            self.advance()
            left = iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.advance()
            return implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.at("|"):
            self.advance()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.at("&"):
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("exists", "forall"):
            kind = EXISTS if self.advance().text == "exists" else FORALL
            binders = [self.typed_binder()]
            while self.at(","):
                self.advance()
                binders.append(self.typed_binder())
            self.expect(".")
            self.scopes.append({n: t for n, t in binders})
            body = self.formula()
            self.scopes.pop()
            for n, t in reversed(binders):
                body = Quant(kind, n, t, body)
            return body
        return self.primary()

    def typed_binder(self) -> tuple[str, TypeExpr]:
        n = self.name()
        self.expect(":")
        return n, self.type()

    def term(self) -> Term:
        if self.at("bot", "top"):
            kind = self.advance().text
            self.expect(":")
            return Lit(kind, self.type())
        return self.name()

    def terms(self, stop: str) -> list[Term]:
        out = [self.term()]
        while self.at(","):
            self.advance()
            out.append(self.term())
        if not self.at(stop):
            self.error(f"expected ',' or {stop!r}")
        return out

    def primary(self) -> Formula:
        tok = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("TC"):
            return self.tc()
        if self.at(*FIX_KINDS, *NFIX_KINDS, *AFIX_KINDS):
            return self.fix()
        if self.at("card"):
            return self.card()
        if self.at("if"):
            self.advance()
            c = self.formula()
            self.expect("then")
            a = self.formula()
            self.expect("else")
            return ite(c, a, self.formula())
        if tok.kind == "NUM" or (self.at("max") and self.peek().text == "("):
            which = self.advance().text
            if which not in ("0", "1", "max"):
                self.error("expected 0, 1 or max", tok)
            self.expect("(")
            x = self.name()
            self.expect(")")
            return formulas.const_formula(which, x, self.fresh)
        if tok.kind == "NAME" and tok.text not in KEYWORDS and self.peek().text == "(":
            head = self.advance().text
            self.advance()
            args = self.terms(")")
            self.advance()
            return Apply(head, tuple(args))
        lhs = self.term()
        if self.at("="):
            self.advance()
            return Equal(lhs, self.term())
        if self.at("!="):
            self.advance()
            return Not(Equal(lhs, self.term()))
        if self.at("=:"):
            self.advance()
            t = self.type()
            return Equal(lhs, self.term(), t)
        self.error("expected an atom")

    def op_binders(self, stops: tuple[str, ...]) -> list[tuple[str, TypeExpr | None]]:
        out = []
        while True:
            n = self.name()
            t = None
            if self.at(":"):
                save = self.i
                self.advance()
                t = self.try_type()
                if t is None or not self.at(",", ";", ":"):
                    self.i = save
                    t = None
            out.append((n, t))
            if self.at(","):
                self.advance()
                continue
            if self.at(*stops):
                return out
            self.error(f"expected ',' or one of {stops}")

    def term_type(self, term: Term) -> TypeExpr | None:
        if isinstance(term, Lit):
            return term.type
        return self.lookup(term)

    def resolve(self, binders, *arg_lists) -> tuple[Binder, ...]:
        out = []
        for i, (n, t) in enumerate(binders):
            if t is None:
                for args in arg_lists:
                    if i < len(args) and self.term_type(args[i]) is not None:
                        t = self.term_type(args[i])
                        break
            out.append(Binder(n, t or IOTA))
        return tuple(out)

    def tc(self) -> Formula:
        self.advance()
        self.expect("[")
        xs = self.op_binders((";",))
        self.advance()
        ys = self.op_binders((":",))
        self.advance()
        self.scopes.append({n: t for n, t in xs + ys})
        body = self.formula()
        self.scopes.pop()
        self.expect("]")
        self.expect("(")
        zs = self.terms(";")
        self.advance()
        ts = self.terms(")")
        self.advance()
        bx = self.resolve(xs, zs, ts)
        by = self.resolve(ys, ts, zs)
        # an untyped binder takes the type of its partner in the other tuple
        bx = tuple(Binder(b.name, t if t is not None else bb.type)
                   for b, bb, (_, t) in zip(bx, by, xs))
        by = tuple(Binder(b.name, t if t is not None else bb.type)
                   for b, bb, (_, t) in zip(by, bx, ys))
        return TC(bx, by, body, tuple(zs), tuple(ts))

    def fix(self) -> Formula:
        kind = self.advance().text
        self.expect("[")
        pred = self.name()
        self.expect(",")
        binary = kind not in FIX_KINDS
        xs = self.op_binders((":",))
        self.advance()
        known = [t for _, t in xs]
        ptype = TypeExpr(tuple(known)) if None not in known else None
        self.scopes.append({pred: ptype, **{n: t for n, t in xs}})
        body0 = self.formula()
        body1 = None
        if binary:
            self.expect(";")
            body1 = self.formula()
        self.scopes.pop()
        self.expect("]")
        self.expect("(")
        args = self.terms(")")
        self.advance()
        bx = self.resolve(xs, args)
        if kind in FIX_KINDS:
            return Fix(kind, pred, bx, body0, tuple(args))
        cls = NFix if kind in NFIX_KINDS else AFix
        return cls(kind, pred, bx, body0, body1, tuple(args))

    def card(self) -> Formula:
        self.advance()
        if not self.at("<=", ">=", "="):
            self.error("expected '<=', '>=' or '=' after card")
        op = self.advance().text
        if self.tok.kind != "NUM":
            self.error("expected a number")
        k = int(self.advance().text)
        self.expect("(")
        target = self.term()
        t = None
        if self.at(":"):
            self.advance()
            t = self.type()
        self.expect(")")
        if t is None:
            t = self.term_type(target)
        if t is None or t.is_iota:
            self.error("card needs a relation of known tuple type; annotate it as card=k(X:T)")
        if isinstance(target, Lit):
            self.error("card of a literal is not supported")
        return formulas.card_formula(op, k, target, t, self.fresh)


def parse_formula(text: str, vocabulary: Mapping[str, TypeExpr] | None = None) -> Formula:
    """Parse formula text.  ``vocabulary`` types free symbols for sugar expansion."""
    p = _Parser(text, vocabulary)
    f = p.formula()
    if p.tok.kind != "EOF":
        p.error("unexpected trailing input")
    return f


# -- printing -------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Lit):
        return f"{t.kind}:{format_type(t.type)}"
    return t


def _binders(bs) -> str:
    return ", ".join(f"{b.name}:{format_type(b.type)}" for b in bs)


def _terms(ts) -> str:
    return ", ".join(format_term(t) for t in ts)


def print_formula(f: Formula) -> str:
    """Canonical text; connectives and quantifiers are fully parenthesised."""
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Apply):
        return f"{f.head}({_terms(f.args)})"
    if isinstance(f, Equal):
        op = "=" if f.type is None else f"=:{format_type(f.type)}"
        return f"{format_term(f.lhs)} {op} {format_term(f.rhs)}"
    if isinstance(f, Not):
        return "!" + print_formula(f.child)
    if isinstance(f, And):
        return "(" + " & ".join(print_formula(c) for c in f.children) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(print_formula(c) for c in f.children) + ")"
    if isinstance(f, Quant):
        return f"({f.kind} {f.var}:{format_type(f.type)}. {print_formula(f.body)})"
    if isinstance(f, TC):
        return (
            f"TC[{_binders(f.xs)}; {_binders(f.ys)} : {print_formula(f.body)}]"
            f"({_terms(f.zs)}; {_terms(f.ts)})"
        )
    if isinstance(f, Fix):
        return f"{f.kind}[{f.pred}, {_binders(f.xs)} : {print_formula(f.body)}]({_terms(f.args)})"
    if isinstance(f, (NFix, AFix)):
        return (
            f"{f.kind}[{f.pred}, {_binders(f.xs)} : {print_formula(f.body0)} ; "
            f"{print_formula(f.body1)}]({_terms(f.args)})"
        )
    raise TypeError(f"not a formula: {f!r}")


def read_formula_file(path, vocabulary=None) -> Formula:
    return parse_formula(Path(path).read_text(encoding="utf-8"), vocabulary)


# -- structure files ------------------------------------------------------

def structure_from_dict(doc) -> Structure:
    if not isinstance(doc, dict):
        raise StructureError("structure document must be an object")
    unknown = set(doc) - {"universe", "vocabulary", "interpretation"}
    if unknown:
        raise StructureError(f"unknown keys {sorted(unknown)}")
    n = doc.get("universe")
    if isinstance(n, bool) or not isinstance(n, int):
        raise StructureError("'universe' must be a natural number")
    vocab_doc = doc.get("vocabulary", {})
    interp = doc.get("interpretation", {})
    if not isinstance(vocab_doc, dict) or not isinstance(interp, dict):
        raise StructureError("'vocabulary' and 'interpretation' must be objects")
    vocab = {}
    for name, tstr in vocab_doc.items():
        if not isinstance(tstr, str):
            raise StructureError(f"type of {name} must be a string")
        try:
            vocab[name] = parse_type(tstr)
        except TypeSyntaxError as exc:
            raise StructureError(f"symbol {name}: {exc}") from None
    return Structure(n, vocab, interp)


def structure_to_dict(s: Structure) -> dict:
    return {
        "universe": s.universe_size,
        "vocabulary": {k: format_type(t) for k, t in s.vocabulary.items()},
        "interpretation": {
            k: to_json_value(s[k], t, s.universe_size) for k, t in s.vocabulary.items()
        },
    }


def loads_structure(text: str) -> Structure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed document: {exc}") from None
    return structure_from_dict(doc)


def load_structure(path) -> Structure:
    return loads_structure(Path(path).read_text(encoding="utf-8"))


def dumps_structure(s: Structure) -> str:
    return json.dumps(structure_to_dict(s), sort_keys=False)


def load_vocabulary(path) -> dict[str, TypeExpr]:
    """A JSON object of name -> type string, or a structure document."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed document: {exc}") from None
    if isinstance(doc, dict) and "universe" in doc:
        doc = doc.get("vocabulary", {})
    if not isinstance(doc, dict):
        raise StructureError("vocabulary must be an object")
    try:
        return {k: parse_type(v) for k, v in doc.items()}
    except (TypeSyntaxError, AttributeError) as exc:
        raise StructureError(f"bad vocabulary: {exc}") from None
