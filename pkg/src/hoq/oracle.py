"""Brute-force reference checks: structure enumeration, equivalence and a
strategy-game reading of the alternating fixed point.

Nothing here shares code with the evaluator's operator implementations;
the only common piece is plain formula evaluation of operator bodies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from .encoder import Value, domain_size, enumerate_relations
from .errors import SearchSpaceTooLarge
from .evaluator import Evaluator
from .limits import DEFAULT_LIMITS, Limits
from .structures import Structure
from .syntax import AFix, Formula
from .types import TypeExpr


def structure_count(vocabulary: Mapping[str, TypeExpr], n: int) -> int:
    total = 1
    for t in vocabulary.values():
        total *= n if t.is_iota else domain_size(t, n)
    return total


def enumerate_structures(vocabulary: Mapping[str, TypeExpr], n: int,
                         limits: Limits = DEFAULT_LIMITS) -> Iterator[Structure]:
    """Every structure over ``vocabulary`` with universe ``range(n)``, once each.

    Symbols vary in name order, the last name fastest.
    """
    names = sorted(vocabulary)
    total = structure_count(vocabulary, n)
    if total > limits.max_enum:
        raise SearchSpaceTooLarge(f"{total} structures exceed limit {limits.max_enum}")
    pools = [list(enumerate_relations(vocabulary[k], n, limits)) for k in names]
    for values in itertools.product(*pools):
        yield Structure(n, dict(vocabulary), dict(zip(names, values)))


@dataclass(frozen=True)
class Counterexample:
    structure: Structure
    left: bool
    right: bool


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    counterexample: Counterexample | None = None
    structures_checked: int = 0

    def __bool__(self) -> bool:
        return self.equivalent


def equivalent(f: Formula, g: Formula, vocabulary: Mapping[str, TypeExpr], n_max: int,
               limits: Limits = DEFAULT_LIMITS, n_min: int = 1) -> EquivalenceVerdict:
    """Compare ``f`` and ``g`` on every structure of size ``n_min..n_max``.

    The first disagreement (smallest size, then enumeration order) is returned.
    """
    checked = 0
    for n in range(n_min, n_max + 1):
        for s in enumerate_structures(vocabulary, n, limits):
            checked += 1
            left = Evaluator(s, limits).eval(f)
            right = Evaluator(s, limits).eval(g)
            if left != right:
                return EquivalenceVerdict(False, Counterexample(s, left, right), checked)
    return EquivalenceVerdict(True, None, checked)


def strategy_apfp(s: Structure, env: Mapping[str, Value] | None, node: AFix,
                  limits: Limits = DEFAULT_LIMITS) -> bool:
    """Alternating fixed point as a game between a chooser and a refuter.

    Positions alternate between choice positions (the chooser picks one
    successor stage) and universal positions (every successor stage must
    be won).  Successors equal to the current stage are never offered, a
    position whose stage is fixed by both bodies is a leaf, and a tuple is
    accepted when the chooser can force every play to end at a leaf that
    contains it.  Plays longer than ``2 * N + 1`` are lost by the chooser;
    positional strategies never need more, since there are only ``2 * N``
    positions.
    """
    env = dict(env or {})
    inflationary = node.kind == "AIFP"
    ev = Evaluator(s, limits, memo=False)
    stage_types = tuple(b.type for b in node.xs)
    tuples = list(itertools.product(*(list(enumerate_relations(t, s.universe_size, limits))
                                      for t in stage_types)))
    names = [node.pred] + [b.name for b in node.xs]

    def apply(body: Formula, p: frozenset) -> frozenset:
        out = set()
        for tup in tuples:
            if inflationary and tup in p:
                out.add(tup)
                continue
            if ev.eval(body, {**env, **dict(zip(names, (p,) + tup))}):
                out.add(tup)
        return frozenset(out)

    @lru_cache(maxsize=None)
    def successors(p: frozenset) -> tuple[frozenset, ...]:
        return tuple({apply(node.body0, p), apply(node.body1, p)} - {p})

    n_relations = 2 ** len(tuples)
    horizon = 2 * n_relations + 1
    target = tuple(ev.value(a, env) for a in node.args)

    @lru_cache(maxsize=None)
    def wins(choice: bool, p: frozenset, depth: int) -> bool:
        succ = successors(p)
        if not succ:
            return target in p
        if depth >= horizon:
            return False
        results = (wins(not choice, q, depth + 1) for q in succ)
        return any(results) if choice else all(results)

    return wins(True, frozenset(), 0)
