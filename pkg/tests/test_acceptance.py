"""Acceptance suite: one check per criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from heisfrob.awpa import (
    awpa_crossing,
    awpa_dot,
    awpa_from_diagram,
    awpa_identity,
    awpa_to_diagram,
    awpa_token,
    random_element,
)
from heisfrob.bubbles import CCW, CW, BubbleSymbol, eval_circle, grassmannian_sweep
from heisfrob.cli import ParseError, parse_expression, print_expression
from heisfrob.diagram import (
    DOWN,
    UP,
    Letter,
    MorphismExpr,
    c_box,
    compose,
    d_box,
    dots,
    from_box,
    identity,
    random_diagram,
    s_box,
    tensor,
    token,
)
from heisfrob.frobenius import dual_basis, fleet
from heisfrob.karoubi import PartialKaroubi, PKObject, TensorCatMorphism, all_objects
from heisfrob.presentations import (
    HEIS,
    HEIS_ALT,
    HEIS_DOUBLE_PRIME,
    HEIS_PRIME,
    bubble_loop,
    build_functor,
    build_presentation,
    lemma_scripts,
    roundtrip_check,
    run_script,
    verify_functor,
    verify_presentation,
)
from heisfrob.rewrite import BudgetExhausted, Verdict, normalize_full

FLEET = fleet()
KS = (-2, -1, 0, 1, 2)
CORPUS = Path(__file__).parent / "data" / "dsl_corpus.txt"
ACCEPTANCE_KEY = pytest.StashKey[list]()


def _partitioned():
    return [(name, F) for name, F in FLEET.items() if F.partitioned]


def _first_failures(bad: list, n: int = 3) -> str:
    return f"{len(bad)} failing, first: {bad[:n]}"


# ---------------------------------------------------------------------------
# criteria


def presentations_consistent():
    bad, count = [], 0
    for name, F in FLEET.items():
        for k in KS:
            for ident in (HEIS, HEIS_PRIME, HEIS_DOUBLE_PRIME, HEIS_ALT):
                if ident in (HEIS_PRIME, HEIS_DOUBLE_PRIME) and not F.partitioned:
                    continue
                rep = verify_presentation(build_presentation(ident, F, k))
                count += len(rep.results)
                bad += [f"{name} k={k} {f.line()}" for f in rep.failures()]
    return not bad, f"{count} relations zero-checked" if not bad else _first_failures(bad)


def functors_f_g():
    bad, count = [], 0
    for name, F in _partitioned():
        for k in KS:
            Fn, G = build_functor("F", F, k), build_functor("G", F, k)
            for phi in (Fn, G):
                rep = verify_functor(phi)
                count += len(rep.results)
                bad += [f"{name} k={k} {phi.name}: {f.line()}" for f in rep.failures()]
            for a, b in ((Fn, G), (G, Fn)):
                if not roundtrip_check(a, b):
                    bad.append(f"{name} k={k} roundtrip {a.name}{b.name}")
    return not bad, f"{count} relation images checked, roundtrips ok" if not bad else _first_failures(bad)


def functors_a_b():
    bad, count = [], 0
    for name, F in FLEET.items():
        for k in KS:
            names = ("A", "B", "Def") if F.partitioned else ("Def",)
            phis = {n: build_functor(n, F, k) for n in names}
            for n, phi in phis.items():
                rep = verify_functor(phi)
                count += len(rep.results)
                bad += [f"{name} k={k} {n}: {f.line()}" for f in rep.failures()]
            if F.partitioned:
                for a, b in (("A", "B"), ("B", "A")):
                    if not roundtrip_check(phis[a], phis[b]):
                        bad.append(f"{name} k={k} roundtrip {a}{b}")
    return not bad, f"{count} relation images checked, roundtrips ok" if not bad else _first_failures(bad)


def decorated_color_lemma():
    bad, count = [], 0
    for name, F in _partitioned():
        for k in KS:
            if k == 0:
                continue
            P = build_presentation(HEIS, F, k)
            for script in lemma_scripts(P):
                rep = run_script(script, P.rules)
                count += len(rep.results)
                bad += [f"{name} k={k} {f.line()}" for f in rep.failures()]
    return not bad, f"{count} scripted identities zero-checked" if not bad else _first_failures(bad)


def infinite_grassmannian():
    bad, count = [], 0
    for name, F in FLEET.items():
        for k in KS:
            for label, rep in grassmannian_sweep(F, k, 6):
                count += 1
                if not rep.ok:
                    bad.append(f"{name} k={k} {label}: {rep.diff()}")
    return not bad, f"{count} identities" if not bad else _first_failures(bad)


def circle_evaluations():
    bad, count = [], 0
    for name, F in FLEET.items():
        for k in KS:
            diagram_route = {None: build_presentation(HEIS_ALT, F, k)}
            colors: list = [None]
            if F.partitioned:
                colors += list(range(1, F.n_colors + 1))
                shared = build_presentation(HEIS_DOUBLE_PRIME, F, k)
                diagram_route.update({c: shared for c in colors[1:]})
            for c in colors:
                # partial trace straight from the structure constants
                e = F.named("1") if c is None else F.idempotent(c)
                for b in F.component_basis(c):
                    f = F.basis_element(b)
                    tr = (f * e).trace()
                    for orient, top, sign in ((CW, k - 1, -1), (CCW, -k - 1, 1)):
                        for r in range(min(top - 3, 0), top + 1):
                            sym = BubbleSymbol(orient, r, f, c, k)
                            want = sign * tr if r == top else Fraction(0)
                            count += 1
                            if eval_circle(sym) != want:
                                bad.append(f"{name} k={k} {sym}: {eval_circle(sym)} != {want}")
                            if r < 0:
                                continue
                            got = normalize_full(bubble_loop(sym, F), diagram_route[c].rules).expr
                            if not (got - identity(()).scale(want)).is_zero():
                                bad.append(f"{name} k={k} {sym} by rewriting: {got!r}")
    return not bad, f"{count} circles, scalar and rewriting routes agree" if not bad else _first_failures(bad)


def awpa_soundness():
    bad = []
    for name, F in FLEET.items():
        rng = random.Random(name)
        for i in range(500):
            m = 1 + i % 3
            x, y, z = (random_element(F, m, rng, max_degree=3) for _ in range(3))
            if (x * y) * z != x * (y * z):
                bad.append(f"{name} associativity m={m}")
        for m in (2, 3):
            for i in range(m - 1):
                s = awpa_crossing(F, m, i)
                if s * s != awpa_identity(F, m):
                    bad.append(f"{name} s^2 m={m}")
        s1, s2 = awpa_crossing(F, 3, 0), awpa_crossing(F, 3, 1)
        if s1 * s2 * s1 != s2 * s1 * s2:
            bad.append(f"{name} braid")
        s = awpa_crossing(F, 2, 0)
        casimir = None
        for b, bv in enumerate(dual_basis(F)):
            t = awpa_token(F, 2, 0, b) * awpa_token(F, 2, 1, bv)
            casimir = t if casimir is None else casimir + t
        if awpa_dot(F, 2, 0) * s - s * awpa_dot(F, 2, 1) != casimir:
            bad.append(f"{name} dot slide")
        # second route: the same products by diagram rewriting
        P = build_presentation(HEIS, F, 0)
        for _ in range(20):
            m = rng.randint(1, 3)
            x, y = (random_element(F, m, rng, max_degree=2, n_terms=2) for _ in range(2))
            diff = awpa_to_diagram(x * y) - compose(awpa_to_diagram(x), awpa_to_diagram(y))
            if not normalize_full(diff, P.rules).expr.is_zero() or awpa_from_diagram(awpa_to_diagram(x), F) != x:
                bad.append(f"{name} diagram route m={m}")
    return not bad, "500 triples per algebra, relations and diagram route ok" if not bad else _first_failures(bad)


def _hom_table():
    """``(algebra, g, src, dst, expected member)`` rows."""
    kk, kx = FLEET["k+k"], FLEET["k[x]/x2+k"]
    e1, e2 = kk.idempotent(1), kk.idempotent(2)

    def tok(F, f, letter=UP):
        return token(F, f, letter)

    s, c, d = from_box(s_box()), from_box(c_box()), from_box(d_box())
    o = PKObject.parse
    return [
        (kk, tok(kk, e1), o("+1"), o("+1"), True),
        (kk, tok(kk, e2), o("+2"), o("+2"), True),
        (kk, compose(dots(1), tok(kk, e1)), o("+1"), o("+1"), True),
        (kk, tensor(tok(kk, e1), tok(kk, e2)), o("+1 +2"), o("+1 +2"), True),
        (kk, compose(s, tensor(tok(kk, e1), tok(kk, e1))), o("+1 +1"), o("+1 +1"), True),
        (kk, compose(s, tensor(tok(kk, e1), tok(kk, e2))), o("+1 +2"), o("+2 +1"), True),
        (kk, compose(tensor(tok(kk, e2, DOWN), tok(kk, e2)), c), o(""), o("-2 +2"), True),
        (kk, compose(d, tensor(tok(kk, e1), tok(kk, e1, DOWN))), o("+1 -1"), o(""), True),
        (kx, tok(kx, "x_1"), o("+1"), o("+1"), True),
        (kk, identity(()), o(""), o(""), True),
        (kk, tok(kk, e2), o("+1"), o("+1"), False),
        (kk, identity("+"), o("+1"), o("+1"), False),
        (kk, dots(1), o("+2"), o("+2"), False),
        (kk, compose(s, tensor(tok(kk, e1), tok(kk, e2))), o("+1 +2"), o("+1 +2"), False),
        (kk, tensor(tok(kk, e1), tok(kk, e2)), o("+2 +1"), o("+2 +1"), False),
        (kk, tensor(tok(kk, e1), tok(kk, e1)), o("+1 +2"), o("+1 +2"), False),
        (kk, c, o(""), o("-1 +1"), False),
        (kk, compose(d, tensor(tok(kk, e1), identity("-"))), o("+1 -2"), o(""), False),
        (kx, tok(kx, "x_1"), o("+2"), o("+2"), False),
        (kx, tok(kx, "1_2"), o("+1"), o("+1"), False),
    ]


def _split_roundtrip(pk: PartialKaroubi, rng: random.Random):
    parts = []
    for col in pk.colors:
        E = pk.blocks[col - 1]
        dom = tuple(rng.choice([UP, DOWN]) for _ in range(rng.randint(0, 2)))
        gens = build_presentation(HEIS, E, pk.k).generators
        term = random_diagram(E, rng, generators=gens, k=pk.k, dom=dom, n_boxes=rng.randint(0, 3))
        parts.append(MorphismExpr.of(term))
    f = TensorCatMorphism.simple(parts)
    src = PKObject(tuple(l for p in parts for l in p.dom), tuple(c for c, p in zip(pk.colors, parts) for _ in p.dom))
    dst = PKObject(tuple(l for p in parts for l in p.cod), tuple(c for c, p in zip(pk.colors, parts) for _ in p.cod))
    sp = pk.split(pk.inclusion(f), src, dst)
    if not isinstance(sp, TensorCatMorphism):
        return False
    blockwise = TensorCatMorphism.simple([normalize_full(p, pk.block_rules(c)).expr for c, p in zip(pk.colors, parts)])
    return (sp - blockwise).is_zero()


def karoubi_equivalence():
    bad, words = [], 0
    for name in ("k+k", "k+k+k"):
        F = FLEET[name]
        for k in (-1, 1):
            pk = PartialKaroubi(F, k)
            for obj in all_objects(F.n_colors, 4):
                words += 1
                v = pk.check_sort(obj)
                if v != (Verdict.ZERO, Verdict.ZERO):
                    bad.append(f"{name} k={k} sort {obj}: {v}")
    rng = random.Random(4)
    for i in range(50):
        name = ("k+k", "k[x]/x2+k", "k+k+k")[i % 3]
        pk = PartialKaroubi(FLEET[name], (-1, 0, 1)[i % 3])
        if not _split_roundtrip(pk, rng):
            bad.append(f"{name} split∘inclusion case {i}")
    for i, (F, g, src, dst, member) in enumerate(_hom_table()):
        v = PartialKaroubi(F, 1).hom_member(g, src, dst)
        if (v == Verdict.ZERO) != member:
            bad.append(f"hom row {i}: {v}")
    return not bad, f"{words} sort isos, 50 splits, 20 hom rows" if not bad else _first_failures(bad)


def normalizer_hygiene():
    bad, unknown = [], 0
    for name, F in FLEET.items():
        rng = random.Random(7)
        for i in range(200):
            k = KS[i % 5]
            idents = [HEIS, HEIS_ALT, HEIS_PRIME, HEIS_DOUBLE_PRIME] if F.partitioned else [HEIS, HEIS_ALT]
            P = build_presentation(idents[i % len(idents)], F, k)
            n = rng.randint(0, 3)
            dom = tuple(Letter(rng.choice([1, -1]), rng.randint(1, F.n_colors) if P.colored else None) for _ in range(n))
            d = random_diagram(F, rng, generators=P.generators, k=k, dom=dom, n_boxes=rng.randint(1, 6), colored=P.colored)
            try:
                once = normalize_full(MorphismExpr.of(d), P.rules, budget=5000).expr
            except BudgetExhausted:
                unknown += 1
                continue
            if normalize_full(once, P.rules).expr != once:
                bad.append(f"{name} {P.ident} k={k}: {d}")
    detail = f"1000 diagrams, {unknown} over budget"
    return not bad, detail if not bad else _first_failures(bad)


DOCUMENTED_ERRORS = [("s @ (1", 7), ("x * * s", 5), ("(x * s", 7)]


def parser_round_trip():
    bad = []
    lines = CORPUS.read_text(encoding="utf-8").splitlines()
    for line in lines:
        ast = parse_expression(line)
        if parse_expression(print_expression(ast)) != ast:
            bad.append(line)
    for text, column in DOCUMENTED_ERRORS:
        try:
            parse_expression(text)
            bad.append(f"{text!r} parsed")
        except ParseError as exc:
            if exc.column != column:
                bad.append(f"{text!r} at column {exc.column}, expected {column}")
    ok = not bad and len(lines) == 100
    return ok, f"{len(lines)} expressions, {len(DOCUMENTED_ERRORS)} error positions" if ok else _first_failures(bad)


CRITERIA = {
    1: ("presentation self-consistency", presentations_consistent),
    2: ("functors F and G", functors_f_g),
    3: ("functors A and B, alternate cups and caps", functors_a_b),
    4: ("decorated cup and cap colors", decorated_color_lemma),
    5: ("infinite Grassmannian", infinite_grassmannian),
    6: ("circle evaluations", circle_evaluations),
    7: ("AWPA soundness", awpa_soundness),
    8: ("partial Karoubi equivalence", karoubi_equivalence),
    9: ("normalizer hygiene", normalizer_hygiene),
    10: ("parser", parser_round_trip),
}


def run_criterion(number: int) -> tuple[bool, str]:
    title, check = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = check()
    line = f"criterion {number:2d} {title}: {'PASS' if ok else 'FAIL'} ({detail}; {time.perf_counter() - start:.1f}s)"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, request, capsys):
    ok, line = run_criterion(number)
    request.config.stash.setdefault(ACCEPTANCE_KEY, []).append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        ok, line = run_criterion(n)
        failed += not ok
        print(line, flush=True)
    sys.exit(1 if failed else 0)
