"""The ten acceptance criteria, each timed against its budget.

A summary line per criterion is printed at the end of the pytest run.
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest

import bodies
import corpus
from conftest import ACCEPTANCE, DATA
from hoq.check import is_prenex, max_quantified_order, typecheck
from hoq.encoder import code_length, counts, decode, encode, enumerate_relations, rank, tuple_space
from hoq.errors import SearchSpaceTooLarge
from hoq.evaluator import Evaluator, eval_apfp, eval_tc
from hoq.formulas import (
    gen_bit,
    gen_eq,
    gen_lt,
    gen_overflow,
    gen_plus,
    gen_plus_mod,
    gen_plus_tuple,
)
from hoq.encoder import position
from hoq.normalize import (
    alternation_bound,
    alternations,
    is_dnf,
    order_block_count,
    order_counts,
    pipeline,
    prefix,
    to_pnf,
    to_pnf_co,
)
from hoq.oracle import enumerate_structures, equivalent, strategy_apfp
from hoq.parser import parse_formula
from hoq.reduction import gen_acc, lower_value, order_ranks, plan, reduce_structure, check_reduction
from hoq.structures import Structure
from hoq.syntax import TRUE, AFix, Binder, Fix, NFix, TC, Apply
from hoq.types import IOTA, arity_type, parse_type

T = parse_type
LT = {"lt": T("(i,i)")}


@contextmanager
def criterion(k: int, part: str, budget: float):
    start = time.perf_counter()
    notes = []
    ok = False
    try:
        yield notes
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        detail = ", ".join(notes + [f"{elapsed:.2f}s of {budget:g}s"])
        ACCEPTANCE.setdefault(k, []).append((part, ok and elapsed < budget, detail))
    assert elapsed < budget, f"criterion {k} took {elapsed:.1f}s, budget {budget}s"


# -- 1 and 2: counts and the code bijection --------------------------------

GRID = sorted({(r, a, n) for r in (1, 2, 3) for a in (1, 2) for n in (1, 2)}
              | {(r, a, n) for r in (1, 2) for a in (1, 2) for n in (1, 2, 3)})
HUGE = (3, 2, 2)  # 2**256 relations


def cell_type(r, a):
    return IOTA if r == 1 else arity_type(a, r)


def test_criterion_1_counts():
    with criterion(1, "enumerable cells", 10) as notes:
        cells = [c for c in GRID if c != HUGE]
        for r, a, n in cells:
            t = cell_type(r, a)
            rels = list(enumerate_relations(t, n))
            rep = counts(r, a, n)
            assert len(rels) == rep.N, (r, a, n)
            assert len(set(rels)) == len(rels)
            if r > 1:
                assert len(tuple_space(t, n)) == rep.C
                assert max((len(v) for v in rels), default=0) == rep.C
        notes.append(f"{len(cells)} cells exact")


@pytest.mark.xfail(raises=SearchSpaceTooLarge, strict=True,
                   reason="r=3, a=2, n=2 has 2**256 relations")
def test_criterion_1_largest_cell():
    r, a, n = HUGE
    with criterion(1, "cell r=3 a=2 n=2", 10) as notes:
        t = cell_type(r, a)
        rep = counts(r, a, n)
        assert len(tuple_space(t, n)) == rep.C == 256 and rep.N == 2**256
        notes.append("C=256 checked; 2**256 relations cannot be enumerated")
        assert sum(1 for _ in enumerate_relations(t, n)) == rep.N


def test_criterion_2_bijection():
    with criterion(2, "enumerable cells", 10) as notes:
        cells = [c for c in GRID if c != HUGE]
        total = 0
        for r, a, n in cells:
            t = cell_type(r, a)
            rep = counts(r, a, n)
            seen = set()
            for v in enumerate_relations(t, n):
                code = encode(v, t, n)
                assert len(code.bits) == rep.B == code_length(t, n)
                assert decode(code) == v
                seen.add(code.bits)
                total += 1
            assert len(seen) == rep.N
        notes.append(f"{total} round trips over {len(cells)} cells")


@pytest.mark.xfail(raises=SearchSpaceTooLarge, strict=True,
                   reason="r=3, a=2, n=2 has 2**256 relations")
def test_criterion_2_largest_cell():
    r, a, n = HUGE
    with criterion(2, "cell r=3 a=2 n=2", 10) as notes:
        t = cell_type(r, a)
        rep = counts(r, a, n)
        rng = random.Random(2)
        tuples = tuple_space(t, n)
        for _ in range(200):
            v = frozenset(x for x in tuples if rng.random() < 0.5)
            code = encode(v, t, n)
            assert len(code.bits) == rep.B and decode(code) == v
        notes.append("200 sampled round trips ok; full grid needs 2**256")
        for v in enumerate_relations(t, n):
            assert decode(encode(v, t, n)) == v


# -- 3, 4, 5: normal forms ---------------------------------------------------

CORPUS = corpus.load()


def test_criterion_3_pipeline_preserves_truth():
    with criterion(3, "corpus", 300) as notes:
        assert len(CORPUS) >= 50
        assert max(corpus.formula_order(f) for _, _, f in CORPUS) == 3
        checks = 0
        for text, v, f in CORPUS:
            n_max = 3 if corpus.formula_order(f) <= 2 else 2
            for stage, g in pipeline(f, v).items():
                verdict = equivalent(f, g, v, n_max)
                assert verdict, (text, stage, verdict.counterexample)
                checks += 1
        notes.append(f"{len(CORPUS)} formulas, {checks} stage checks")


def test_criterion_4_pnf_bound():
    with criterion(4, "corpus and merge example", 1) as notes:
        v = {"c": IOTA}
        f = typecheck(parse_formula((DATA / "merge_pnf.hoq").read_text(), v), v)
        g = to_pnf(2, f)
        assert [(q.kind, q.var) for q in prefix(g)[0]] == [("exists", "Z"), ("forall", "X"), ("exists", "Y")]
        cases = 0
        for _, _, f in CORPUS:
            lo = max(max_quantified_order(f), 1)
            for r in range(lo, 4):
                for start, conv in (("exists", to_pnf), ("forall", to_pnf_co)):
                    g = conv(r, f)
                    assert is_prenex(g)
                    assert alternations(g, r, start) <= alternation_bound(r, f, start)
                    cases += 1
        notes.append(f"{cases} conversions")


def test_criterion_5_dnf_shape():
    with criterion(5, "corpus", 60) as notes:
        for text, v, f in CORPUS:
            stages = pipeline(f, v)
            before = to_pnf(None, stages["anf"])
            after = stages["dnf"]
            orders = [q.type.order for q in prefix(after)[0]]
            assert orders == sorted(orders, reverse=True) and is_dnf(after), text
            if orders:
                top = max(order_counts(before))
                assert order_counts(after)[top] == order_counts(before)[top], text
        notes.append(f"{len(CORPUS)} formulas")


# -- 6 and 7: fixed points ---------------------------------------------------

P = {"P": T("(i)")}
X = (Binder("x", IOTA),)


def afix(kind, b0, b1):
    f = typecheck(parse_formula(f"forall z:i. {kind}[S, x : {b0} ; {b1}](z)", P), P)
    return f.body


def apfp_disagreements(node):
    bad = 0
    for s in enumerate_structures(P, 2):
        for z in range(2):
            bad += strategy_apfp(s, {"z": z}, node) != eval_apfp(s, {"z": z}, node)
    return bad


def test_criterion_6_tree_equals_strategies():
    with criterion(6, "random pairs and edge cases", 300) as notes:
        pairs = bodies.random_pairs(120, seed=6)
        edge = [("false", "false"), ("S(x)", "S(x)"), ("P(x)", "P(x)"), ("P(x) | S(x)", "P(x) | S(x)"),
                ("!S(x)", "!S(x)"), ("!S(x)", "S(x) | P(x)"), ("P(x)", "!P(x) & !S(x)")]
        bad = 0
        for b0, b1 in pairs + edge:
            for kind in ("APFP", "AIFP"):
                bad += apfp_disagreements(afix(kind, b0, b1))
        assert bad == 0
        notes.append(f"{len(pairs)} random pairs, {len(edge)} edge pairs, both kinds")


def test_criterion_7_fixpoint_semantics():
    with criterion(7, "20-body pool, n<=3", 120) as notes:
        pool = bodies.load()
        assert len(pool) == 20
        flip = Fix("PFP", "S", X, parse_formula("!S(x)", {"S": T("(i)"), "x": IOTA}), ("z",))
        structures = [s for n in (1, 2, 3) for s in enumerate_structures(bodies.VOCAB, n)]
        for s in structures:
            assert not any(Evaluator(s).eval(flip, {"z": z}) for z in range(s.universe_size))
        for s in structures:
            ev = Evaluator(s)
            n_tuples = s.universe_size
            for b in pool:
                stages, fixed = ev.fix_stages(Fix("IFP", "S", X, b, ("z",)), {})
                assert fixed and all(x <= y for x, y in zip(stages, stages[1:]))
                assert len(stages) - 1 <= n_tuples
                for b1 in pool:
                    order, _ = ev.nfix_graph(NFix("NPFP", "S", X, b, b1, ("z",)), {})
                    assert len(order) <= 2**n_tuples
        notes.append(f"{len(structures)} structures, {len(pool) ** 2} body pairs")


# -- 8: arithmetic -----------------------------------------------------------

ORDERED = Structure(2, LT, {"lt": frozenset({(0, 1)})})


def numbered(t):
    return [(v, rank(v, t, 2)) for v in enumerate_relations(t, 2)]


def test_criterion_8_arithmetic():
    with criterion(8, "r=2,3 triples and two-digit sums", 300) as notes:
        ev = Evaluator(ORDERED)
        evals = 0
        for r in (2, 3):
            t = arity_type(1, r)
            vals = numbered(t)
            p = len(vals)
            eq, lt, over = gen_eq(1, r), gen_lt(1, r), gen_overflow(1, r)
            for (x, i), (y, j) in itertools.product(vals, repeat=2):
                env = {"X": x, "Y": y}
                assert ev.eval(eq.formula, env) == (i == j)
                assert ev.eval(lt.formula, env) == (i < j)
                assert ev.eval(over.formula, env) == (i + j >= p)
                evals += 3
            plus, mod = gen_plus(1, r), gen_plus_mod(1, r)
            for (x, i), (y, j), (z, k) in itertools.product(vals, repeat=3):
                env = {"X": x, "Y": y, "Z": z}
                assert ev.eval(plus.formula, env) == (i + j == k)
                assert ev.eval(mod.formula, env) == ((i + j) % p == k)
                evals += 2
            bit = gen_bit(1, r)
            lower = arity_type(1, r - 1)
            for rel, _ in vals:
                bits = encode(rel, t, 2).bits
                for s1 in enumerate_relations(lower, 2):
                    want = bits[position((s1,), t, 2)] == "1"
                    assert ev.eval(bit.formula, {"R": rel, "S1": s1}) == want
                    evals += 1

        t = arity_type(2, 2)
        vals = numbered(t)
        p = len(vals)
        pt = gen_plus_tuple(2, 2)

        def env(x1, x2, y1, y2, z1, z2):
            return {"X1": x1, "X2": x2, "Y1": y1, "Y2": y2, "Z1": z1, "Z2": z2}

        by_value = dict((k, v) for v, k in vals)
        for (x1, i1), (x2, i2), (y1, j1), (y2, j2) in itertools.product(vals, repeat=4):
            total = (i1 + p * i2 + j1 + p * j2) % (p * p)
            z1, z2 = by_value[total % p], by_value[total // p]
            assert ev.eval(pt.formula, env(x1, x2, y1, y2, z1, z2))
            evals += 1
        rng = random.Random(8)
        for _ in range(1000):
            (x1, i1), (x2, i2), (y1, j1), (y2, j2) = (rng.choice(vals) for _ in range(4))
            total = (i1 + p * i2 + j1 + p * j2) % (p * p)
            for (z1, k1), (z2, k2) in itertools.product(vals, repeat=2):
                want = k1 + p * k2 == total
                assert ev.eval(pt.formula, env(x1, x2, y1, y2, z1, z2)) == want
                evals += 1
        notes.append(f"{evals} evaluations, plus_tuple sum checked on all {p ** 4} pairs, "
                     "full iff on 1000 seeded pairs")


# -- 9: order reduction --------------------------------------------------------

def test_criterion_9_reduction():
    with criterion(9, "20-formula corpus, n=2", 300) as notes:
        entries = corpus.load_reduction()
        assert len(entries) == 20
        assert max(corpus.formula_order(f) for _, _, f in entries) == 3
        runs = 0
        for text, v, f in entries:
            p = plan(v, f, 2)
            for s in enumerate_structures(v, 2):
                if s["lt"] not in (frozenset({(0, 1)}), frozenset({(1, 0)})):
                    continue  # the reduction needs lt to be a total order
                assert check_reduction(p, s, f), (text, s)
                runs += 1
        images = 0
        for name in ("(i)", "((i))", "((i),i)", "(i,(i))"):
            t = T(name)
            v = {**LT, "R": t}
            p = plan(v, TRUE, 2)
            acc = gen_acc(t.order - 1, t.arity, p.a)
            rels = list(enumerate_relations(t, 2))
            for lt in (frozenset({(0, 1)}), frozenset({(1, 0)})):
                s = Structure(2, v, {"lt": lt, "R": rels[0]})
                target = reduce_structure(p, s)
                ranks = order_ranks(s)
                ev = Evaluator(target)
                for rel in rels:
                    assert ev.eval(acc.formula, {"X": lower_value(rel, t, 2, ranks)})
                    images += 1
        notes.append(f"{runs} formula-structure pairs, {images} acc images")


# -- 10: transitive closure ------------------------------------------------------

def reachable(n, edges):
    out = set()
    for start in range(n):
        seen, todo = {start}, [start]
        while todo:
            u = todo.pop()
            for a, b in edges:
                if a == u and b not in seen:
                    seen.add(b)
                    todo.append(b)
        out |= {(start, t) for t in seen}
    return out


def test_criterion_10_tc():
    with criterion(10, "all 2- and 3-node digraphs", 60) as notes:
        node = TC((Binder("x", IOTA),), (Binder("y", IOTA),), Apply("E", ("x", "y")), ("z",), ("t",))
        graphs = 0
        for n in (2, 3):
            pairs = list(itertools.product(range(n), repeat=2))
            for mask in range(2 ** len(pairs)):
                edges = frozenset(e for k, e in enumerate(pairs) if mask >> k & 1)
                s = Structure(n, {"E": T("(i,i)")}, {"E": edges})
                got = {(z, t) for z in range(n) for t in range(n) if eval_tc(s, {"z": z, "t": t}, node)}
                assert got == reachable(n, edges)
                graphs += 1
        assert graphs == 16 + 512
        notes.append(f"{graphs} graphs")
