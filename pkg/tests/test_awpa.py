import random
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisfrob.awpa import (
    NotPositivePart,
    StrandCountMismatch,
    awpa_crossing,
    awpa_dot,
    awpa_from_diagram,
    awpa_identity,
    awpa_to_diagram,
    awpa_token,
    labels_up_to,
    perm_compose,
    random_element,
    reduced_word,
    simple,
    span_size,
)
from heisfrob.diagram import c_box, compose, from_box
from heisfrob.frobenius import dual_basis, fleet
from heisfrob.presentations import HEIS, build_presentation
from heisfrob.rewrite import normalize_full

FLEET = fleet()
NAMES = list(FLEET)


def test_crossing_squares_to_identity():
    for F in FLEET.values():
        s = awpa_crossing(F, 2, 0)
        assert s * s == awpa_identity(F, 2)


def test_braid_relation():
    F = FLEET["k[x]/x2+k"]
    s1, s2 = awpa_crossing(F, 3, 0), awpa_crossing(F, 3, 1)
    assert s1 * s2 * s1 == s2 * s1 * s2


@pytest.mark.parametrize("name", NAMES)
def test_dot_slide_gives_casimir(name):
    F = FLEET[name]
    s = awpa_crossing(F, 2, 0)
    lhs = awpa_dot(F, 2, 0) * s - s * awpa_dot(F, 2, 1)
    rhs = None
    for b, bv in zip(range(F.dim), dual_basis(F)):
        term = awpa_token(F, 2, 0, b) * awpa_token(F, 2, 1, bv)
        rhs = term if rhs is None else rhs + term
    assert lhs == rhs


def test_dot_is_central_with_tokens():
    F = FLEET["k[x]/x2"]
    assert awpa_dot(F, 1, 0) * awpa_token(F, 1, 0, "x") == awpa_token(F, 1, 0, "x") * awpa_dot(F, 1, 0)
    assert (awpa_token(F, 1, 0, "x") * awpa_token(F, 1, 0, "x")).is_zero()


def test_permutations():
    assert perm_compose(simple(3, 0), simple(3, 0)) == (0, 1, 2)
    assert len(reduced_word((2, 1, 0))) == 3
    assert reduced_word((0, 1, 2)) == []


def test_span_size_matches_label_count():
    F = FLEET["k+k"]
    for m in (1, 2):
        for deg in (0, 1, 2):
            assert len(labels_up_to(F, m, deg)) == span_size(F, m, deg)
    assert span_size(F, 3, 0) == 8 * factorial(3)


def test_errors():
    F = FLEET["k"]
    with pytest.raises(StrandCountMismatch):
        awpa_identity(F, 1) * awpa_identity(F, 2)
    with pytest.raises(NotPositivePart):
        awpa_from_diagram(from_box(c_box()), F)


@given(st.sampled_from(NAMES), st.integers(1, 3), st.integers(0, 2**32))
def test_ring_laws(name, m, seed):
    F = FLEET[name]
    rng = random.Random(seed)
    x, y, z = (random_element(F, m, rng) for _ in range(3))
    one = awpa_identity(F, m)
    assert (x * y) * z == x * (y * z)
    assert x * one == x == one * x
    assert x * (y + z) == x * y + x * z


@given(st.sampled_from(NAMES), st.integers(1, 3), st.integers(0, 2**32))
def test_product_agrees_with_diagram_rewriting(name, m, seed):
    F = FLEET[name]
    rng = random.Random(seed)
    x, y = (random_element(F, m, rng, max_degree=2, n_terms=2) for _ in range(2))
    P = build_presentation(HEIS, F, 0)
    diff = awpa_to_diagram(x * y) - compose(awpa_to_diagram(x), awpa_to_diagram(y))
    assert normalize_full(diff, P.rules).expr.is_zero()
    assert awpa_from_diagram(awpa_to_diagram(x), F) == x
