"""Truth of formulas over finite structures.

Quantifiers range over every relation of their type (guarded by the
enumeration limit).  The seven operators are evaluated as follows.

* TC: forward reachable-set closure of the step relation from ``zs``.
* PFP: stages from the empty relation; a repeated stage that is not a
  fixpoint means a cycle and the answer is false.
* IFP: PFP of the inflationary body ``P(xs) | body``.
* NPFP / NIFP: breadth-first search of the stage graph with one edge per
  body; the answer relation is the union of reachable common fixpoints.
* APFP / AIFP: the alternating tree rooted at ``(union, empty)`` whose
  children flip the connective; a label repeated on its root path is cut
  and yields the empty relation, self-loop children are skipped.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .encoder import Value, check_enumerable, empty_relation, enumerate_relations, full_relation
from .errors import SearchSpaceTooLarge, UnboundSymbol
from .limits import DEFAULT_LIMITS, Limits
from .structures import Structure
from .syntax import (
    EXISTS,
    AFix,
    And,
    Apply,
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
    map_subformulas,
)
from .types import TypeExpr

UNION = "union"
INTERSECTION = "intersection"


@dataclass
class EvalStats:
    quantifier_expansions: int = 0
    fixpoint_stages: int = 0
    tree_nodes: int = 0

    def as_dict(self) -> dict:
        return {
            "quantifier_expansions": self.quantifier_expansions,
            "fixpoint_stages": self.fixpoint_stages,
            "tree_nodes": self.tree_nodes,
        }


class Evaluator:
    """Evaluates formulas over one structure, memoising closed subproblems.

    Quantifier and operator nodes are cached on the values of their free
    variables, so repeated subformulas are evaluated once per assignment.
    """

    def __init__(self, structure: Structure, limits: Limits = DEFAULT_LIMITS, memo: bool = True,
                 miniscope: bool = True):
        self.structure = structure
        self.use_miniscope = miniscope
        self._scoped: dict[int, tuple[Formula, Formula]] = {}
        self.n = structure.universe_size
        self.limits = limits
        self.stats = EvalStats()
        self.use_memo = memo
        self._memo: dict = {}
        self._free: dict[int, tuple[Formula, tuple[str, ...]]] = {}
        self._spaces: dict = {}

    # -- environment --
    def value(self, term: Term, env: Mapping[str, Value]) -> Value:
        if isinstance(term, Lit):
            return full_relation(term.type, self.n) if term.kind == "top" else empty_relation(term.type)
        if term in env:
            return env[term]
        try:
            return self.structure.interpretation[term]
        except KeyError:
            raise UnboundSymbol(f"symbol {term} is not bound") from None

    def _key(self, f: Formula, env) -> tuple:
        entry = self._free.get(id(f))
        if entry is None:
            entry = (f, tuple(sorted(free_vars(f))))
            self._free[id(f)] = entry
        return (id(f), tuple(self.value(v, env) for v in entry[1]))

    def space(self, types: tuple[TypeExpr, ...]) -> tuple[tuple, ...]:
        """All tuples over the given component types."""
        sp = self._spaces.get(types)
        if sp is None:
            total = 1
            for t in types:
                total *= check_enumerable(t, self.n, self.limits)
            if total > self.limits.max_enum:
                raise SearchSpaceTooLarge(f"{total} tuples exceed limit {self.limits.max_enum}")
            doms = [list(enumerate_relations(t, self.n, self.limits)) for t in types]
            sp = tuple(itertools.product(*doms))
            self._spaces[types] = sp
        return sp

    # -- main entry --
    def eval(self, f: Formula, env: Mapping[str, Value] | None = None) -> bool:
        if self.use_miniscope:
            entry = self._scoped.get(id(f))
            if entry is None:
                entry = (f, miniscope(f))
                self._scoped[id(f)] = entry
            f = entry[1]
        return self._eval(f, dict(env or {}))

    def _eval(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Apply):
            rel = self.value(f.head, env)
            return tuple(self.value(a, env) for a in f.args) in rel
        if isinstance(f, Equal):
            return self.value(f.lhs, env) == self.value(f.rhs, env)
        if isinstance(f, Not):
            return not self._eval(f.child, env)
        if isinstance(f, And):
            return all(self._eval(c, env) for c in f.children)
        if isinstance(f, Or):
            return any(self._eval(c, env) for c in f.children)
        if isinstance(f, Truth):
            return f.value
        if not self.use_memo:
            return self._dispatch(f, env)
        key = self._key(f, env)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._dispatch(f, env)
            self._memo[key] = hit
        return hit

    def _dispatch(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Quant):
            return self._quant(f, env)
        if isinstance(f, TC):
            return self.tc(f, env)
        if isinstance(f, Fix):
            return self.fix(f, env)
        if isinstance(f, NFix):
            return self.nfix(f, env)
        if isinstance(f, AFix):
            return self.afix(f, env)
        raise TypeError(f"not a formula: {f!r}")

    def _quant(self, f: Quant, env: dict) -> bool:
        want = f.kind == EXISTS
        missing = object()
        old = env.get(f.var, missing)
        try:
            for v in enumerate_relations(f.type, self.n, self.limits):
                self.stats.quantifier_expansions += 1
                env[f.var] = v
                if self._eval(f.body, env) == want:
                    return want
            return not want
        finally:
            _restore(env, {f.var: old}, missing)

    def _holds(self, body: Formula, env: dict, names, values) -> bool:
        missing = object()
        old = {k: env.get(k, missing) for k in names}
        try:
            for k, v in zip(names, values):
                env[k] = v
            return self._eval(body, env)
        finally:
            _restore(env, old, missing)

    # -- TC --
    def tc_reachable(self, f: TC, env: Mapping[str, Value]) -> set[tuple]:
        """Tuples reachable from ``zs`` (including ``zs`` itself)."""
        env = dict(env)
        space = self.space(tuple(b.type for b in f.xs))
        names = [b.name for b in f.xs + f.ys]
        start = tuple(self.value(z, env) for z in f.zs)
        seen = {start}
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for b in space:
                if b not in seen and self._holds(f.body, env, names, a + b):
                    seen.add(b)
                    queue.append(b)
        return seen

    def tc(self, f: TC, env: Mapping[str, Value]) -> bool:
        start = tuple(self.value(z, env) for z in f.zs)
        target = tuple(self.value(t, env) for t in f.ts)
        if start == target:
            return True
        return target in self.tc_reachable(f, env)

    # -- stage operators --
    def stage(self, pred: str, xs, body: Formula, env: dict, current: frozenset,
              inflationary: bool = False) -> frozenset:
        self.stats.fixpoint_stages += 1
        names = [pred] + [b.name for b in xs]
        out = []
        for tup in self.space(tuple(b.type for b in xs)):
            if inflationary and tup in current:
                out.append(tup)
            elif self._holds(body, env, names, (current,) + tup):
                out.append(tup)
        return frozenset(out)

    def fix_stages(self, f: Fix, env: Mapping[str, Value]) -> tuple[list[frozenset], bool]:
        """Stage sequence from the empty relation and whether it ends in a fixpoint."""
        env = dict(env)
        inflationary = f.kind == "IFP"
        stages = [frozenset()]
        seen = {stages[0]}
        while True:
            nxt = self.stage(f.pred, f.xs, f.body, env, stages[-1], inflationary)
            if nxt == stages[-1]:
                return stages, True
            if nxt in seen:
                stages.append(nxt)
                return stages, False
            seen.add(nxt)
            stages.append(nxt)

    def fix_relation(self, f: Fix, env: Mapping[str, Value]) -> frozenset:
        stages, fixed = self.fix_stages(f, env)
        return stages[-1] if fixed else frozenset()

    def fix(self, f: Fix, env: Mapping[str, Value]) -> bool:
        args = tuple(self.value(a, env) for a in f.args)
        return args in self.fix_relation(f, env)

    def nfix_graph(self, f: NFix, env: Mapping[str, Value]) -> tuple[list[frozenset], list[frozenset]]:
        """Reachable stages in BFS order and the common fixpoints among them."""
        env = dict(env)
        inflationary = f.kind == "NIFP"
        start = frozenset()
        order = [start]
        seen = {start}
        fixpoints = []
        queue = deque([start])
        while queue:
            p = queue.popleft()
            s0 = self.stage(f.pred, f.xs, f.body0, env, p, inflationary)
            s1 = self.stage(f.pred, f.xs, f.body1, env, p, inflationary)
            if s0 == p and s1 == p:
                fixpoints.append(p)
            for q in (s0, s1):
                if q not in seen:
                    seen.add(q)
                    order.append(q)
                    queue.append(q)
        return order, fixpoints

    def nfix_relation(self, f: NFix, env: Mapping[str, Value]) -> frozenset:
        _, fixpoints = self.nfix_graph(f, env)
        return frozenset().union(*fixpoints)

    def nfix(self, f: NFix, env: Mapping[str, Value]) -> bool:
        args = tuple(self.value(a, env) for a in f.args)
        return args in self.nfix_relation(f, env)

    def afix_relation(self, f: AFix, env: Mapping[str, Value]) -> frozenset:
        """Output relation of the alternating tree."""
        env = dict(env)
        inflationary = f.kind == "AIFP"
        steps: dict[frozenset, tuple[frozenset, frozenset]] = {}

        def children(p):
            if p not in steps:
                steps[p] = (
                    self.stage(f.pred, f.xs, f.body0, env, p, inflationary),
                    self.stage(f.pred, f.xs, f.body1, env, p, inflationary),
                )
            return steps[p]

        def output(conn, p, path):
            self.stats.tree_nodes += 1
            s0, s1 = children(p)
            if s0 == p and s1 == p:
                return p
            flipped = INTERSECTION if conn == UNION else UNION
            results = []
            for q in dict.fromkeys((s0, s1)):
                if q == p:
                    continue
                label = (flipped, q)
                if label in path:
                    results.append(frozenset())
                else:
                    results.append(output(flipped, q, path | {label}))
            if conn == UNION:
                return frozenset().union(*results)
            return frozenset.intersection(*results)

        root = frozenset()
        return output(UNION, root, frozenset({(UNION, root)}))

    def afix(self, f: AFix, env: Mapping[str, Value]) -> bool:
        args = tuple(self.value(a, env) for a in f.args)
        return args in self.afix_relation(f, env)


def _push(kind: str, var: str, t: TypeExpr, body: Formula) -> Formula:
    """``Quant(kind, var, t, body)`` with the quantifier moved as far in as it goes.

    Every type has a non-empty domain, so a quantifier over a body that
    does not mention its variable can be dropped.
    """
    if var not in free_vars(body):
        return body
    spread, split = (Or, And) if kind == EXISTS else (And, Or)
    if isinstance(body, spread):
        return spread(tuple(_push(kind, var, t, c) for c in body.children))
    if isinstance(body, split):
        inside = [c for c in body.children if var in free_vars(c)]
        outside = [c for c in body.children if var not in free_vars(c)]
        if outside:
            inner = inside[0] if len(inside) == 1 else split(tuple(inside))
            return split(tuple(outside) + (_push(kind, var, t, inner),))
    return Quant(kind, var, t, body)


def miniscope(f: Formula) -> Formula:
    """An equivalent formula with every quantifier scoped as narrowly as possible."""
    if isinstance(f, Quant):
        return _push(f.kind, f.var, f.type, miniscope(f.body))
    if isinstance(f, (Apply, Equal, Truth)):
        return f
    return map_subformulas(f, miniscope)


def _restore(env: dict, old: dict, missing) -> None:
    for k, v in old.items():
        if v is missing:
            env.pop(k, None)
        else:
            env[k] = v


def evaluate(
    structure: Structure,
    f: Formula,
    env: Mapping[str, Value] | None = None,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    return Evaluator(structure, limits).eval(f, env)


def eval_tc(s: Structure, env, node: TC, limits: Limits = DEFAULT_LIMITS) -> bool:
    return Evaluator(s, limits).tc(node, dict(env or {}))


def eval_pfp(s: Structure, env, node: Fix, limits: Limits = DEFAULT_LIMITS) -> bool:
    return Evaluator(s, limits).fix(node, dict(env or {}))


eval_ifp = eval_pfp


def eval_npfp(s: Structure, env, node: NFix, limits: Limits = DEFAULT_LIMITS) -> bool:
    return Evaluator(s, limits).nfix(node, dict(env or {}))


eval_nifp = eval_npfp


def eval_apfp(s: Structure, env, node: AFix, limits: Limits = DEFAULT_LIMITS) -> bool:
    return Evaluator(s, limits).afix(node, dict(env or {}))


eval_aifp = eval_apfp
