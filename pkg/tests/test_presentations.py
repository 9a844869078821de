import pytest

from heisfrob.diagram import compose, from_box, identity, s_box, t_box, token, tp_box, up
from heisfrob.frobenius import build_algebra, fleet
from heisfrob.presentations import (
    HEIS,
    HEIS_ALT,
    HEIS_DOUBLE_PRIME,
    HEIS_PRIME,
    MissingPartition,
    UnknownPresentation,
    apply_functor,
    build_functor,
    build_presentation,
    lemma_scripts,
    roundtrip_check,
    run_script,
    verify_functor,
    verify_presentation,
)
from heisfrob.rewrite import Verdict, check_equal

FLEET = fleet()


def test_sideways_crossings_are_inverse_at_k0():
    P = build_presentation(HEIS, FLEET["k"], 0)
    assert check_equal(compose(from_box(tp_box()), from_box(t_box())), identity("+-"), P.rules) == Verdict.ZERO


@pytest.mark.parametrize("name,k", [("k+k", 1), ("k[x]/x2+k", 2), ("k[x]/x2+k", -1)])
def test_inversion_matrix_size_per_color(name, k):
    F = FLEET[name]
    P = build_presentation(HEIS_PRIME, F, k)
    side = "cup" if k > 0 else "cap"
    for i in range(1, F.n_colors + 1):
        n = sum(1 for r in P.relations if r.name.startswith(f"inversion-2-{side}[{i};"))
        assert 1 + n == 1 + abs(k) * len(F.component_basis(i))


def test_colored_presentation_needs_a_partition():
    plain = build_algebra(["1"], {("1", "1"): [1]}, [1], name="plain")
    assert build_presentation(HEIS, plain, -1).rules is not None
    with pytest.raises(MissingPartition):
        build_presentation(HEIS_PRIME, plain, -1)
    with pytest.raises(UnknownPresentation):
        build_presentation("Heis3", plain, 0)


@pytest.mark.parametrize("ident", [HEIS, HEIS_PRIME, HEIS_DOUBLE_PRIME, HEIS_ALT])
@pytest.mark.parametrize("k", [-1, 0, 1])
def test_presentation_self_consistency(ident, k):
    rep = verify_presentation(build_presentation(ident, FLEET["k[x]/x2+k"], k))
    assert rep.passed, rep.failures()


def test_functor_images_of_generators():
    F = FLEET["k+k"]
    G = build_functor("G", F, 1)
    img = apply_functor(G, from_box(s_box()))
    assert len(img.terms) == 4
    assert {t.dom for t in img.terms} == {(up(i), up(j)) for i in (1, 2) for j in (1, 2)}
    img = apply_functor(G, token(F, "1"))
    assert {t.dom for t in img.terms} == {(up(1),), (up(2),)}
    Fn = build_functor("F", F, 1)
    P = build_presentation(HEIS, F, 1)
    back = apply_functor(Fn, token(F, "1_1", up(1)))
    assert check_equal(back, token(F, "1_1"), P.rules) == Verdict.ZERO


def test_functor_checks():
    assert verify_functor(build_functor("F", FLEET["k+k"], 1)).passed
    assert verify_functor(build_functor("G", FLEET["k[x]/x2+k"], -1)).passed


def test_corrupted_functor_is_caught():
    G = build_functor("G", FLEET["k[x]/x2+k"], -1)
    bad = G.corrupted("G-bad", lambda bx: bx.kind == "s" and bx.dom[0].color == 1 and bx.dom[1].color == 2)
    rep = verify_functor(bad)
    assert not rep.passed
    assert any(r.name.startswith("doublecross-up") and r.verdict == Verdict.NONZERO for r in rep.results)


@pytest.mark.parametrize("pair", [("F", "G"), ("G", "F"), ("A", "B"), ("B", "A")])
def test_roundtrips(pair):
    F = FLEET["k[x]/x2+k"]
    phi, psi = (build_functor(n, F, 1) for n in pair)
    assert roundtrip_check(phi, psi)


@pytest.mark.parametrize("k", [-2, -1, 1, 2])
def test_decorated_color_lemma_script(k):
    P = build_presentation(HEIS, FLEET["k[x]/x2+k"], k)
    (script,) = lemma_scripts(P)
    rep = run_script(script, P.rules)
    assert rep.results and rep.passed
    assert "phase 1" in script.to_text()


def test_report_lines():
    rep = verify_presentation(build_presentation(HEIS, FLEET["k"], 0))
    assert all(line.startswith("rule ") and line.endswith(" steps)") for line in rep.lines())
