from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisfrob.bubbles import (
    CCW,
    CW,
    UNDETERMINED,
    BubblePolynomial,
    BubbleSymbol,
    NotInFakeRange,
    bubble_value,
    eval_circle,
    expand_negative_bubble,
    grassmannian_check,
    is_generator,
)
from heisfrob.frobenius import dual_numbers, fleet, ground_field

FLEET = fleet()


def test_clockwise_circle_below_threshold():
    F = ground_field()
    assert eval_circle(BubbleSymbol(CW, 0, F.one, None, 1)) == -1
    assert eval_circle(BubbleSymbol(CW, 1, F.one, None, 3)) == 0


def test_counterclockwise_circle_reads_the_trace():
    F = dual_numbers()
    assert eval_circle(BubbleSymbol(CCW, 0, F.named("x"), None, -1)) == 1
    assert eval_circle(BubbleSymbol(CCW, 0, F.one, None, -1)) == 0


def test_genuine_bubbles_are_undetermined():
    F = ground_field()
    sym = BubbleSymbol(CW, 1, F.one, None, 1)
    assert eval_circle(sym) is UNDETERMINED
    assert is_generator(sym)


def test_fake_bubble_conventions():
    F = dual_numbers()
    x = F.named("x")
    for k in (1, 2):
        assert expand_negative_bubble(BubbleSymbol(CCW, -k - 1, x, None, k)) == BubblePolynomial.scalar(1)
        assert expand_negative_bubble(BubbleSymbol(CCW, -k - 2, x, None, k)).is_zero()


def test_one_by_one_determinant():
    F = ground_field()
    got = expand_negative_bubble(BubbleSymbol(CCW, -1, F.one, None, 1))
    assert got == BubblePolynomial.symbol(BubbleSymbol(CW, 1, F.one, None, 1))


def test_expansion_outside_fake_range_is_rejected():
    F = ground_field()
    with pytest.raises(NotInFakeRange):
        expand_negative_bubble(BubbleSymbol(CCW, 3, F.one, None, 1))


def test_colored_token_must_live_in_its_block():
    F = FLEET["k+k"]
    with pytest.raises(ValueError):
        BubbleSymbol(CW, 0, F.idempotent(2), 1, 1)


def test_grassmannian_examples():
    F = ground_field()
    for k in range(-2, 3):
        ok, rep = grassmannian_check(F.one, F.one, 0, k)
        assert ok and rep.expected == BubblePolynomial.scalar(-1)
    D = dual_numbers()
    ok, rep = grassmannian_check(D.one, D.named("x"), 0, 2)
    assert ok and rep.expected == BubblePolynomial.scalar(-1)
    ok, rep = grassmannian_check(D.one, D.one, -1, 2)
    assert ok and rep.lhs_integer_form.is_zero()


def test_bubble_value_is_linear_in_the_token():
    F = FLEET["k[x]/x2+k"]
    a, b = F.named("x_1"), F.named("1_2")
    for k in (-1, 1, 2):
        for orient in (CW, CCW):
            for r in range(-3, 4):
                lhs = bubble_value(BubbleSymbol(orient, r, a + b, None, k))
                rhs = bubble_value(BubbleSymbol(orient, r, a, None, k)) + bubble_value(BubbleSymbol(orient, r, b, None, k))
                assert lhs == rhs


@pytest.mark.parametrize("name", list(FLEET))
@given(
    coefs=st.lists(st.integers(-2, 2), min_size=6, max_size=6),
    t=st.integers(-2, 4),
    k=st.integers(-2, 2),
)
def test_grassmannian_for_random_tokens(name, coefs, t, k):
    F = FLEET[name]
    f = F.element([Fraction(c) for c in coefs[: F.dim]])
    g = F.element([Fraction(c) for c in coefs[3 : 3 + F.dim]])
    assert grassmannian_check(f, g, t, k)[0]
    for i in range(1, F.n_colors + 1):
        assert grassmannian_check(f, g, t, k, i)[0]
