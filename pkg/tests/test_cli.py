import io
from pathlib import Path

import pytest
from hypothesis import given

from dsl_strategies import expressions
from heisfrob.cli import (
    ParseError,
    UnknownColor,
    UnknownToken,
    parse_expression,
    parse_morphism,
    print_expression,
    run_command,
)
from heisfrob.diagram import compose, from_box, identity, s_box, tensor
from heisfrob.frobenius import fleet
from heisfrob.presentations import HEIS, build_presentation
from heisfrob.rewrite import Verdict, check_equal

FLEET = fleet()
CORPUS = Path(__file__).parent / "data" / "dsl_corpus.txt"


def run(*argv):
    out = io.StringIO()
    code = run_command(argv, out)
    return code, out.getvalue()


@given(expressions)
def test_print_parse_round_trip(ast):
    assert parse_expression(print_expression(ast)) == ast


def test_corpus_round_trips():
    lines = CORPUS.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 100
    for line in lines:
        ast = parse_expression(line)
        assert parse_expression(print_expression(ast)) == ast, line


@pytest.mark.parametrize(
    "text,column,message",
    [("s @ (1", 7, "expected ','"), ("x * * s", 5, "expected an atom or '('"), ("(x * s", 7, "expected ')'")],
)
def test_parse_error_columns(text, column, message):
    with pytest.raises(ParseError) as exc:
        parse_expression(text)
    assert exc.value.column == column
    assert exc.value.message == message


def test_unknown_names_and_colors():
    with pytest.raises(UnknownToken) as exc:
        parse_expression("x * y")
    assert exc.value.column == 5
    with pytest.raises(UnknownToken):
        parse_morphism("tok(z)", FLEET["k"])
    with pytest.raises(UnknownColor):
        parse_morphism("x@3", FLEET["k+k"])


def test_precedence_is_left_to_right():
    F = FLEET["k"]
    P = build_presentation(HEIS, F, 0)
    a = parse_morphism("s * s # id(+) * id(+++)", F)
    s = from_box(s_box())
    b = compose(tensor(compose(s, s), identity("+")), identity("+++"))
    assert check_equal(a, b, P.rules) == Verdict.ZERO


def test_library_verdict_matches_cli():
    F = FLEET["k"]
    P = build_presentation(HEIS, F, 0)
    lhs, rhs = "(x # id(+)) * s - s * (id(+) # x)", "id(++)"
    lib = check_equal(parse_morphism(lhs, F), parse_morphism(rhs, F), P.rules)
    code, out = run("check-equal", lhs, rhs, "--algebra", "k", "--k", "0")
    assert lib == Verdict.ZERO
    assert out.splitlines()[-1] == lib
    assert out.splitlines()[0].startswith("rule check-equal: Zero (")
    assert code == 0
    code, out = run("check-equal", "s", "id(++)")
    assert (code, out.splitlines()[-1]) == (1, Verdict.NONZERO)


def test_exit_codes():
    assert run("normalize", "d * c'", "--k", "0")[0] == 0
    assert run("normalize", "s * s * s * s", "--budget", "1")[0] == 2
    assert run("normalize", "s @ (1")[0] == 1
    code, out = run("bubble-eval", "--cw", "--k", "1")
    assert (code, out.strip()) == (0, "-1")
    assert run("verify-presentation", "--algebra", "k+k", "--k", "1", "--cat", "heis-prime")[0] == 0
    assert run("verify-functor", "G", "--algebra", "k+k", "--k", "-1")[0] == 0
    assert run("roundtrip", "--pair", "A,B", "--algebra", "k[x]/x2+k", "--k", "1")[0] == 0
    assert run("grassmannian", "--algebra", "k+k", "--k", "2", "--max-t", "3")[0] == 0
    assert run("color-sort", "+2 -1", "--algebra", "k+k", "--k", "1")[0] == 0


def test_algebra_file(tmp_path):
    path = tmp_path / "dual.alg"
    path.write_text(
        "basis: 1, x\n1*1 = 1\n1*x = x\nx*1 = x\ntr(x) = 1\n",
        encoding="utf-8",
    )
    assert run("bubble-eval", "--algebra", str(path), "--k", "1", "--token", "x") == (0, "-1\n")
    assert run("bubble-eval", "--algebra", str(tmp_path / "missing.alg"))[0] == 1
