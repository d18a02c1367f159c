"""Scoping, typing, alpha renaming and fragment classification."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Mapping

from .errors import HoqError
from .syntax import (
    EXISTS,
    FORALL,
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
    free_vars,
    is_operator,
    local_binders,
    map_subformulas,
    pred_type,
    walk,
)
from .types import TypeExpr, format_type, is_monadic


# -- diagnostics -----------------------------------------------------------

@dataclass(frozen=True)
class UnboundVariable:
    name: str
    where: str

    def __str__(self) -> str:
        return f"unbound variable {self.name} in {self.where}"


@dataclass(frozen=True)
class TypeMismatch:
    where: str
    expected: str
    found: str

    def __str__(self) -> str:
        return f"type mismatch in {self.where}: expected {self.expected}, found {self.found}"


@dataclass(frozen=True)
class NegatedNondeterministicFixpoint:
    where: str

    def __str__(self) -> str:
        return f"nondeterministic fixpoint under negation: {self.where}"


class TypeCheckError(HoqError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def _show(f: Formula) -> str:
    from .parser import print_formula

    text = print_formula(f)
    return text if len(text) <= 80 else text[:77] + "..."


class _Checker:
    def __init__(self, vocabulary: Mapping[str, TypeExpr]):
        self.scope: list[dict[str, TypeExpr]] = [dict(vocabulary)]
        self.errors: list = []

    def lookup(self, name: str) -> TypeExpr | None:
        for frame in reversed(self.scope):
            if name in frame:
                return frame[name]
        return None

    def term_type(self, t: Term, where: Formula) -> TypeExpr | None:
        if isinstance(t, Lit):
            return t.type
        found = self.lookup(t)
        if found is None:
            self.errors.append(UnboundVariable(t, _show(where)))
        return found

    def expect(self, t: Term, expected: TypeExpr, where: Formula) -> None:
        found = self.term_type(t, where)
        if found is not None and found != expected:
            self.errors.append(TypeMismatch(
                f"{_show(where)} at {t if isinstance(t, str) else 'literal'}",
                format_type(expected), format_type(found),
            ))

    def args(self, terms, types, where: Formula) -> None:
        if len(terms) != len(types):
            self.errors.append(TypeMismatch(_show(where), f"{len(types)} arguments", f"{len(terms)}"))
            return
        for term, t in zip(terms, types):
            self.expect(term, t, where)

    def bodies(self, bindings: dict[str, TypeExpr], body: Formula, negated: bool) -> Formula:
        self.scope.append(bindings)
        try:
            return self.check(body, negated)
        finally:
            self.scope.pop()

    def check(self, f: Formula, negated: bool = False) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Apply):
            head = self.lookup(f.head)
            if head is None:
                self.errors.append(UnboundVariable(f.head, _show(f)))
            elif head.is_iota:
                self.errors.append(TypeMismatch(_show(f), "a relation type", "i"))
            else:
                self.args(f.args, head.children, f)
            return f
        if isinstance(f, Equal):
            lt = self.term_type(f.lhs, f)
            rt = self.term_type(f.rhs, f)
            t = f.type
            for found in (lt, rt):
                if found is None:
                    continue
                if t is None:
                    t = found
                elif found != t:
                    self.errors.append(TypeMismatch(_show(f), format_type(t), format_type(found)))
            return replace(f, type=t) if t is not None else f
        if isinstance(f, Not):
            return Not(self.check(f.child, not negated))
        if isinstance(f, (And, Or)):
            return map_subformulas(f, lambda c: self.check(c, negated))
        if isinstance(f, Quant):
            return replace(f, body=self.bodies({f.var: f.type}, f.body, negated))
        if isinstance(f, TC):
            if not (len(f.xs) == len(f.ys) == len(f.zs) == len(f.ts)):
                self.errors.append(TypeMismatch(_show(f), "tuples of one length", "different lengths"))
            for x, y in zip(f.xs, f.ys):
                if x.type != y.type:
                    self.errors.append(TypeMismatch(_show(f), format_type(x.type), format_type(y.type)))
            types = [b.type for b in f.xs]
            self.args(f.zs, types, f)
            self.args(f.ts, types, f)
            bindings = {b.name: b.type for b in f.xs + f.ys}
            return replace(f, body=self.bodies(bindings, f.body, negated))
        if isinstance(f, (Fix, NFix, AFix)):
            if isinstance(f, NFix) and negated:
                self.errors.append(NegatedNondeterministicFixpoint(_show(f)))
            self.args(f.args, [b.type for b in f.xs], f)
            bindings = {f.pred: pred_type(f.xs), **{b.name: b.type for b in f.xs}}
            return map_subformulas(f, lambda c: self.bodies(bindings, c, negated))
        raise TypeError(f"not a formula: {f!r}")


def typecheck(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> Formula:
    """Check scoping and types; returns ``f`` with equality types filled in.

    Raises :class:`TypeCheckError` listing every problem found.
    """
    checker = _Checker(vocabulary or {})
    out = checker.check(f)
    if checker.errors:
        raise TypeCheckError(checker.errors)
    return out


# -- alpha renaming --------------------------------------------------------

_TRAILING_DIGITS = re.compile(r"\d+$")


class _Renamer:
    def __init__(self, used):
        self.used = set(used)

    def fresh(self, name: str) -> str:
        if name not in self.used:
            self.used.add(name)
            return name
        base = _TRAILING_DIGITS.sub("", name) or name
        k = 1
        while f"{base}{k}" in self.used:
            k += 1
        new = f"{base}{k}"
        self.used.add(new)
        return new

    @staticmethod
    def term(t: Term, env: dict[str, str]) -> Term:
        return env.get(t, t) if isinstance(t, str) else t

    def binders(self, bs, env):
        out = []
        for b in bs:
            new = self.fresh(b.name)
            env[b.name] = new
            out.append(Binder(new, b.type))
        return tuple(out)

    def run(self, f: Formula, env: dict[str, str]) -> Formula:
        if isinstance(f, Truth):
            return f
        if isinstance(f, Apply):
            return Apply(self.term(f.head, env), tuple(self.term(a, env) for a in f.args))
        if isinstance(f, Equal):
            return replace(f, lhs=self.term(f.lhs, env), rhs=self.term(f.rhs, env))
        if isinstance(f, Not):
            return Not(self.run(f.child, env))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(self.run(c, env) for c in f.children))
        if isinstance(f, Quant):
            inner = dict(env)
            new = self.fresh(f.var)
            inner[f.var] = new
            return Quant(f.kind, new, f.type, self.run(f.body, inner))
        if isinstance(f, TC):
            zs = tuple(self.term(t, env) for t in f.zs)
            ts = tuple(self.term(t, env) for t in f.ts)
            inner = dict(env)
            xs = self.binders(f.xs, inner)
            ys = self.binders(f.ys, inner)
            return TC(xs, ys, self.run(f.body, inner), zs, ts)
        if isinstance(f, (Fix, NFix, AFix)):
            args = tuple(self.term(t, env) for t in f.args)
            inner = dict(env)
            pred = self.fresh(f.pred)
            inner[f.pred] = pred
            xs = self.binders(f.xs, inner)
            if isinstance(f, Fix):
                return Fix(f.kind, pred, xs, self.run(f.body, inner), args)
            return type(f)(f.kind, pred, xs, self.run(f.body0, inner), self.run(f.body1, inner), args)
        raise TypeError(f"not a formula: {f!r}")


def alpha_rename(f: Formula, avoid=()) -> Formula:
    """Make every bound name distinct from each other and from free names.

    A binder keeps its name when that name is still unused; otherwise it
    gets the base name (trailing digits removed) plus the smallest free
    numeric suffix, in pre-order.
    """
    return _Renamer(set(free_vars(f)) | set(avoid)).run(f, {})


def names_distinct(f: Formula) -> bool:
    """No name is bound twice, and no bound name is also free."""
    seen = set(free_vars(f))
    for g in walk(f):
        for name in local_binders(g):
            if name in seen:
                return False
            seen.add(name)
    return True


# -- classification --------------------------------------------------------

def prefix(f: Formula) -> tuple[list[Quant], Formula]:
    """Leading quantifiers and the remaining matrix."""
    quants = []
    while isinstance(f, Quant):
        quants.append(f)
        f = f.body
    return quants, f


def is_prenex(f: Formula) -> bool:
    """Quantifiers only in the leading prefix; operators count as atoms."""
    _, matrix = prefix(f)
    stack = [matrix]
    while stack:
        g = stack.pop()
        if isinstance(g, Quant):
            return False
        if isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(g.children)
    return True


def count_blocks(kinds: list[str]) -> int:
    blocks = 0
    last = None
    for k in kinds:
        if k != last:
            blocks += 1
            last = k
    return blocks


def order_blocks(f: Formula, r: int) -> tuple[int, str | None]:
    """Blocks of order-``r`` quantifiers in the prefix and the first block's kind."""
    quants, _ = prefix(f)
    kinds = [q.kind for q in quants if q.type.order == r]
    return count_blocks(kinds), (kinds[0] if kinds else None)


def quantified_types(f: Formula) -> list[tuple[str, TypeExpr]]:
    return [(g.var, g.type) for g in walk(f) if isinstance(g, Quant)]


def max_quantified_order(f: Formula) -> int:
    return max((t.order for _, t in quantified_types(f)), default=0)


@dataclass(frozen=True)
class FragmentReport:
    r: int
    j: int
    j_raw: int
    co: bool
    f: int
    monadic: bool
    prenex: bool
    operator_free: bool

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "j": self.j,
            "j_raw": self.j_raw,
            "co": self.co,
            "f": self.f,
            "monadic": self.monadic,
            "prenex": self.prenex,
            "operator_free": self.operator_free,
        }


def classify(f: Formula, vocabulary: Mapping[str, TypeExpr] | None = None) -> FragmentReport:
    from .normalize import to_pnf

    vocabulary = vocabulary or {}
    r = max_quantified_order(f)
    free_orders = [vocabulary[n].order for n in free_vars(f) if n in vocabulary]
    j_raw, _ = order_blocks(f, r) if r else (0, None)
    if r:
        j, first = order_blocks(to_pnf(r, alpha_rename(f)), r)
    else:
        j, first = 0, None
    return FragmentReport(
        r=r,
        j=j,
        j_raw=j_raw,
        co=first == FORALL,
        f=max(free_orders, default=0),
        monadic=all(is_monadic(t) for _, t in quantified_types(f)),
        prenex=is_prenex(f),
        operator_free=not any(is_operator(g) for g in walk(f)),
    )
