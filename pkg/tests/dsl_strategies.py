"""Hypothesis strategies for DSL syntax trees."""

from fractions import Fraction

from hypothesis import strategies as st

from heisfrob.cli import Atom, Group, Sum, Term

LABELS = ("1", "x", "1_1", "x_1", "1_2", "e1", "e2")
colors = st.none() | st.integers(1, 3)


@st.composite
def atoms(draw):
    name = draw(st.sampled_from(["x", "s", "t", "t'", "c", "d", "c'", "d'", "tok", "sqcup", "sqcap", "id"]))
    if name == "id":
        letters = draw(st.lists(st.tuples(st.sampled_from([1, -1]), colors), max_size=3))
        return Atom("id", tuple(letters))
    if name in ("s", "t", "t'"):
        color = draw(st.none() | st.tuples(st.integers(1, 3), st.integers(1, 3)))
    else:
        color = draw(colors)
    args: tuple = ()
    if name == "tok":
        args = (draw(st.sampled_from(LABELS)),)
    elif name in ("sqcup", "sqcap"):
        args = (draw(st.integers(0, 4)), draw(st.sampled_from(LABELS)))
    return Atom(name, args, color)


coefs = st.none() | st.fractions(min_value=0, max_value=20, max_denominator=7).map(Fraction)


def terms(factor):
    return st.integers(0, 3).flatmap(
        lambda n: st.builds(
            Term,
            coefs,
            st.lists(factor, min_size=n + 1, max_size=n + 1).map(tuple),
            st.lists(st.sampled_from("*#"), min_size=n, max_size=n).map(tuple),
        )
    )


def sums(factor):
    return st.integers(1, 3).flatmap(
        lambda n: st.builds(
            Sum,
            st.lists(terms(factor), min_size=n, max_size=n).map(tuple),
            st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n).map(tuple),
        )
    )


factors = st.recursive(atoms(), lambda inner: sums(inner).map(Group), max_leaves=6)
expressions = sums(factors)
