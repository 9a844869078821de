from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisfrob.frobenius import (
    AlgebraMismatch,
    CrossComponentProductNonzero,
    NotAssociative,
    NotUnital,
    TraceDegenerate,
    TraceNotSymmetric,
    build_algebra,
    component_algebra,
    direct_sum,
    dual_basis,
    dual_numbers,
    fleet,
    format_algebra,
    ground_field,
    multiply,
    parse_algebra,
    trace,
)

FLEET = fleet()


def test_ground_field_is_valid():
    F = build_algebra(["1"], {("1", "1"): [1]}, [1])
    assert F.dim == 1
    assert F.one.coords == (Fraction(1),)


def test_dual_numbers_by_hand():
    F = build_algebra(
        ["1", "x"],
        {("1", "1"): {"1": 1}, ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}, ("x", "x"): {}},
        {"1": 0, "x": 1},
    )
    x = F.named("x")
    assert multiply(x, x).is_zero()
    assert trace(x) == 1 and trace(F.one) == 0


def test_zero_trace_is_degenerate():
    table = {("1", "1"): {"1": 1}, ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}, ("x", "x"): {}}
    with pytest.raises(TraceDegenerate):
        build_algebra(["1", "x"], table, {"1": 0, "x": 0})


def test_non_associative_table_is_rejected():
    # a*a = b, b*a = 0 but a*b = a breaks (a*a)*a = a*(a*a)
    table = {("u", "u"): {"u": 1}, ("u", "a"): {"a": 1}, ("a", "u"): {"a": 1}, ("a", "a"): {"u": 1}}
    build_algebra(["u", "a"], table, {"u": 1})
    bad = dict(table)
    bad[("a", "a")] = {"a": 1}
    bad[("u", "a")] = {"u": 1}
    with pytest.raises((NotAssociative, NotUnital)):
        build_algebra(["u", "a"], bad, {"u": 1})


def test_missing_unit_is_rejected():
    with pytest.raises(NotUnital):
        build_algebra(["a"], {("a", "a"): {}}, {"a": 1})


def test_asymmetric_trace_is_rejected():
    # upper triangular 2x2 matrices: tr(E12 E21) differs from tr(E21 E12) for a skewed trace
    basis = ["e11", "e12", "e21", "e22"]
    prod = {}
    for a in basis:
        for b in basis:
            i, j = int(a[1]), int(a[2])
            k, l = int(b[1]), int(b[2])
            prod[(a, b)] = {f"e{i}{l}": 1} if j == k else {}
    with pytest.raises(TraceNotSymmetric):
        build_algebra(basis, prod, {"e11": 1, "e22": 2})


def test_cross_component_products_must_vanish():
    table = {("a", "a"): {"a": 1}, ("a", "b"): {"b": 1}, ("b", "a"): {"b": 1}, ("b", "b"): {"a": 1}}
    with pytest.raises(CrossComponentProductNonzero):
        build_algebra(["a", "b"], table, {"a": 1}, {"a": 1, "b": 2})


def test_idempotents_in_k_plus_k():
    F = FLEET["k+k"]
    e1, e2 = F.idempotent(1), F.idempotent(2)
    assert (e1 * e2).is_zero()
    assert e1 * e1 == e1
    assert e1 + e2 == F.one


def test_algebra_mismatch():
    with pytest.raises(AlgebraMismatch):
        multiply(FLEET["k"].one, FLEET["k+k"].one)


def test_dual_basis_examples():
    assert [d.coords for d in dual_basis(ground_field())] == [(1,)]
    dn = dual_numbers()
    one_dual, x_dual = dual_basis(dn)
    assert one_dual == dn.named("x") and x_dual == dn.one
    kk = FLEET["k+k"]
    assert dual_basis(kk) == [kk.idempotent(1), kk.idempotent(2)]


def test_direct_sum_blocks():
    F = direct_sum([dual_numbers(), ground_field()])
    assert F.dim == 3 and F.n_colors == 2
    duals = dual_basis(F)
    assert duals[F.index("1_1")] == F.named("x_1")
    assert duals[F.index("1_2")] == F.named("1_2")
    single = direct_sum([ground_field()])
    assert single.idempotent(1) == single.one


def test_component_algebra_restricts():
    F = FLEET["k[x]/x2+k"]
    E = component_algebra(F, 1)
    assert E.dim == 2
    assert [d.coords for d in dual_basis(E)] == [d.coords for d in dual_basis(dual_numbers())]


def test_text_format_round_trip(algebra):
    again = parse_algebra(format_algebra(algebra))
    assert again.basis == algebra.basis
    assert again.structure == algebra.structure
    assert again.trace_vector == algebra.trace_vector
    assert again.components == algebra.components


def elements(F):
    coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.lists(coef, min_size=F.dim, max_size=F.dim).map(F.element)


@pytest.mark.parametrize("name", list(FLEET))
@given(data=st.data())
def test_ring_laws(name, data):
    F = FLEET[name]
    a, b, c = (data.draw(elements(F)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert F.one * a == a == a * F.one
    assert trace(a * b) == trace(b * a)


@pytest.mark.parametrize("name", list(FLEET))
def test_dual_basis_pairing(name):
    F = FLEET[name]
    duals = dual_basis(F)
    for i in range(F.dim):
        for j in range(F.dim):
            assert trace(F.basis_element(i) * duals[j]) == (1 if i == j else 0)
