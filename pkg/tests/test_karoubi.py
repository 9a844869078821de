import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisfrob.diagram import DOWN, UP, MorphismExpr, compose, dots, from_box, random_diagram, s_box, tensor, token
from heisfrob.frobenius import fleet
from heisfrob.karoubi import (
    ComponentBoundaryMismatch,
    PartialKaroubi,
    PKObject,
    TensorCatMorphism,
    all_objects,
)
from heisfrob.presentations import HEIS, build_presentation
from heisfrob.rewrite import Verdict, equal_zero, normalize_full

FLEET = fleet()


@pytest.fixture(scope="module", params=[-1, 1])
def pk2(request):
    return PartialKaroubi(FLEET["k+k"], request.param)


def test_object_parsing():
    o = PKObject.parse("+2 -1 +1")
    assert str(o) == "+2 -1 +1"
    assert len(o) == 3 and not o.is_sorted()
    assert str(PKObject.parse("")) == "𝟙"
    with pytest.raises(ValueError):
        PKObject.parse("*1")


def test_all_objects_count():
    assert sum(1 for _ in all_objects(2, 2)) == 1 + 4 + 16


def test_color_sort_is_stable(pk2):
    target, iso, inv = pk2.color_sort(PKObject.parse("+2 -1 +1"))
    assert str(target) == "-1 +1 +2"
    assert iso.dom == PKObject.parse("+2 -1 +1").letters
    assert inv.dom == target.letters


@pytest.mark.slow
def test_sort_isomorphisms_short_words(pk2):
    for obj in all_objects(2, 3):
        assert pk2.check_sort(obj) == (Verdict.ZERO, Verdict.ZERO), str(obj)


def test_hom_membership(pk2):
    F = pk2.algebra
    e1, e2 = F.idempotent(1), F.idempotent(2)
    o1 = PKObject.parse("+1")
    assert pk2.hom_member(o1.idempotent(F), o1, o1) == Verdict.ZERO
    assert pk2.hom_member(token(F, e2, UP), o1, o1) == Verdict.NONZERO
    assert pk2.hom_member(compose(dots(1), token(F, e1, UP)), o1, o1) == Verdict.ZERO
    assert pk2.hom_member(dots(1), o1, o1) == Verdict.NONZERO


def test_split_of_colored_tokens(pk2):
    F = pk2.algebra
    o = PKObject.parse("+1 +2")
    g = tensor(token(F, F.idempotent(1), UP), token(F, F.idempotent(2), UP))
    sp = pk2.split(g, o, o)
    assert isinstance(sp, TensorCatMorphism)
    assert equal_zero(pk2.inclusion(sp) - compose(o.idempotent(F), g), pk2.rules) == Verdict.ZERO


def test_split_rejects_mixed_crossings(pk2):
    o = PKObject.parse("+1 +2")
    s = from_box(s_box())
    with pytest.raises(ValueError):
        pk2.split(s, PKObject.parse("+2 +1"), o)
    # a crossing between different colors dies between the idempotents
    assert pk2.split(s, o, o).is_zero()


def test_inclusion_component_count(pk2):
    with pytest.raises(ComponentBoundaryMismatch):
        pk2.inclusion(TensorCatMorphism.identity([(UP,)]))


@settings(max_examples=15)
@given(st.sampled_from(["k+k", "k[x]/x2+k", "k+k+k"]), st.sampled_from([-1, 0, 1]), st.integers(0, 2**32))
def test_split_inverts_inclusion(name, k, seed):
    pk = PartialKaroubi(FLEET[name], k)
    rng = random.Random(seed)
    parts = []
    for c in pk.colors:
        E = pk.blocks[c - 1]
        dom = tuple(rng.choice([UP, DOWN]) for _ in range(rng.randint(0, 2)))
        gens = build_presentation(HEIS, E, k).generators
        parts.append(MorphismExpr.of(random_diagram(E, rng, generators=gens, k=k, dom=dom, n_boxes=rng.randint(0, 3))))
    f = TensorCatMorphism.simple(parts)
    src = PKObject(tuple(l for p in parts for l in p.dom), tuple(c for c, p in zip(pk.colors, parts) for _ in p.dom))
    dst = PKObject(tuple(l for p in parts for l in p.cod), tuple(c for c, p in zip(pk.colors, parts) for _ in p.cod))
    sp = pk.split(pk.inclusion(f), src, dst)
    assert isinstance(sp, TensorCatMorphism), sp
    blockwise = TensorCatMorphism.simple(
        [normalize_full(p, pk.block_rules(c)).expr for c, p in zip(pk.colors, parts)]
    )
    assert (sp - blockwise).is_zero()
