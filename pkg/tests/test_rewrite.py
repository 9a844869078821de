import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisfrob.diagram import (
    DOWN,
    UP,
    MorphismExpr,
    c_box,
    compose,
    compose_all,
    d_box,
    from_box,
    identity,
    random_diagram,
    s_box,
    t_box,
    tensor,
    token,
    tp_box,
)
from heisfrob.frobenius import fleet
from heisfrob.presentations import build_presentation
from heisfrob.rewrite import (
    BudgetExhausted,
    NoMatch,
    Verdict,
    apply_rule_once,
    check_equal,
    equal_zero,
    measure,
    normalize,
    normalize_full,
)

FLEET = fleet()


def zigzag():
    return compose(tensor(from_box(d_box()), identity("+")), tensor(identity("+"), from_box(c_box())))


def rules(name="k", k=0, ident="Heis"):
    return build_presentation(ident, FLEET[name], k).rules


def test_zigzag_rule_straightens_once():
    rs = rules()
    out = apply_rule_once(zigzag(), rs.get("zigzag-up"), rs=rs)
    assert out == identity("+")


def test_double_crossing_rule():
    rs = rules()
    ss = compose(from_box(s_box()), from_box(s_box()))
    assert apply_rule_once(ss, rs.get("doublecross-up"), rs=rs) == identity("++")


def test_token_merge_uses_the_algebra():
    F = FLEET["k[x]/x2"]
    rs = rules("k[x]/x2")
    m = compose(token(F, "x"), token(F, "x"))
    assert apply_rule_once(m, rs.get("token-merge-up"), rs=rs).is_zero()


def test_rule_without_match():
    rs = rules()
    assert apply_rule_once(identity("+"), rs.get("braid"), rs=rs) is NoMatch


def test_normalize_zigzag_is_spanning():
    rs = rules()
    res = normalize_full(zigzag(), rs)
    assert res.expr == normalize(identity("+"), rs)
    assert res.spanning_form


def test_sideways_crossings_invert_at_k0():
    rs = rules(k=0)
    assert check_equal(compose(from_box(tp_box()), from_box(t_box())), identity("+-"), rs) == Verdict.ZERO


def test_token_slide_zero_checks():
    F = FLEET["k[x]/x2"]
    rs = rules("k[x]/x2", k=1)
    x = token(F, "x")
    s = from_box(s_box())
    lhs = compose(tensor(x, identity("+")), s)
    rhs = compose(s, tensor(identity("+"), x))
    assert equal_zero(lhs - rhs, rs) == Verdict.ZERO


def test_nonzero_verdicts():
    F = FLEET["k+k"]
    rs = rules("k+k", k=1)
    assert equal_zero(identity("+"), rs) == Verdict.NONZERO
    # the unit is not rewritten into the sum of idempotents, so this stays nonzero
    assert equal_zero(identity("+") - token(F, F.idempotent(1)), rs) == Verdict.NONZERO


def test_budget_exhaustion_reports_partial_work():
    rs = rules("k[x]/x2", k=2)
    with pytest.raises(BudgetExhausted) as exc:
        normalize_full(_busy(), rs, budget=2)
    assert exc.value.steps == 2
    assert exc.value.partial.dom == _busy().dom


def _busy():
    s = from_box(s_box())
    s3 = compose_all(tensor(s, identity("+")), tensor(identity("+"), s), tensor(s, identity("+")))
    return compose(s3, compose(s3, s3))


@pytest.mark.parametrize("name", list(FLEET))
@given(seed=st.integers(0, 10**6), n_boxes=st.integers(1, 6), k=st.integers(-2, 2))
def test_normalize_is_idempotent_and_measure_drops(name, seed, n_boxes, k):
    F = FLEET[name]
    rng = random.Random(seed)
    P = build_presentation("HeisAlt" if seed % 2 else "Heis", F, k)
    dom = tuple(rng.choice([UP, DOWN]) for _ in range(rng.randint(0, 3)))
    d = random_diagram(F, rng, generators=P.generators, k=k, dom=dom, n_boxes=n_boxes)
    # normalize_full asserts the measure decreases at every step
    once = normalize_full(MorphismExpr.of(d), P.rules, budget=5000).expr
    assert normalize_full(once, P.rules, budget=5000).expr == once


def test_measure_is_a_tuple_of_naturals():
    (term,) = _busy().terms
    mu = measure(term)
    assert all(isinstance(v, int) and v >= 0 for v in mu)
