"""Diagram DSL and command-line front end.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := rational? factor (('*' | '#') factor)*
    factor := atom | '(' expr ')'

``*`` composes (left factor on top), ``#`` tensors (left factor on the
left); both associate to the left at the same precedence.  Atoms are ``x``,
``s``, ``t``, ``t'``, ``c``, ``d``, ``c'``, ``d'``, ``tok(name)``,
``sq(r,name)cup``, ``sq(r,name)cap`` and ``id(word)`` where ``word`` is a
string of ``+`` and ``-``.  Any atom takes a color suffix: ``@i`` for
one-colored generators, ``@(i,j)`` for crossings, and per letter inside
``id``, as in ``id(+@1 -@2)``.

Errors carry 1-based columns::

    s @ (1      column 7: expected ','
    x * * s     column 5: expected an atom or '('
    (x * s      column 7: expected ')'
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .awpa import AwpaElement, NotPositivePart, awpa_from_diagram, awpa_mul
from .bubbles import CCW, CW, BubbleSymbol, bubble_value, grassmannian_sweep
from .diagram import (
    BoundaryMismatch,
    Letter,
    MorphismExpr,
    c_box,
    compose,
    cp_box,
    d_box,
    dot_box,
    dp_box,
    from_box,
    identity,
    s_box,
    sq_cap,
    sq_cup,
    t_box,
    tensor,
    token,
    tp_box,
    up,
)
from .frobenius import FrobeniusAlgebra, FrobeniusError, fleet, parse_algebra
from .karoubi import PartialKaroubi, PKObject, SplitUnknown
from .presentations import (
    FUNCTOR_NAMES,
    HEIS,
    HEIS_ALT,
    HEIS_DOUBLE_PRIME,
    HEIS_PRIME,
    RelationResult,
    Report,
    build_functor,
    build_presentation,
    roundtrip_report,
    verify_functor,
    verify_presentation,
    zero_check,
)
from .rewrite import BudgetExhausted, Verdict, normalize_full

# ---------------------------------------------------------------------------
# errors


class DslError(ValueError):
    """An error located at a 1-based ``column`` of the input."""

    def __init__(self, message: str, column: int):
        self.message = message
        self.column = column
        super().__init__(f"column {column}: {message}")


class ParseError(DslError):
    pass


class UnknownToken(DslError):
    pass


class UnknownColor(DslError):
    pass


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Atom:
    """A generator.  ``args`` is ``(name,)`` for ``tok``, ``(r, name)`` for
    ``sqcup``/``sqcap`` and the letter tuple ``((sign, color), ...)`` for
    ``id``; empty otherwise."""

    name: str
    args: tuple = ()
    color: int | tuple[int, int] | None = None
    column: int = field(default=0, compare=False)

    def __str__(self) -> str:
        if self.name == "id":
            letters = " ".join(("+" if s > 0 else "-") + ("" if c is None else f"@{c}") for s, c in self.args)
            return f"id({letters})"
        if self.name == "tok":
            head = f"tok({self.args[0]})"
        elif self.name in ("sqcup", "sqcap"):
            head = f"sq({self.args[0]},{self.args[1]}){self.name[2:]}"
        else:
            head = self.name
        if self.color is None:
            return head
        if isinstance(self.color, tuple):
            return f"{head}@({self.color[0]},{self.color[1]})"
        return f"{head}@{self.color}"


@dataclass(frozen=True)
class Group:
    expr: "Sum"

    def __str__(self) -> str:
        return f"({self.expr})"


@dataclass(frozen=True)
class Term:
    """``coef f_0 op_1 f_1 ...`` with ``ops[i]`` joining ``factors[i]`` and
    ``factors[i+1]``; ``coef`` is ``None`` when no scalar was written."""

    coef: Fraction | None
    factors: tuple
    ops: tuple[str, ...] = ()

    def __str__(self) -> str:
        parts = [str(self.factors[0])]
        for op, f in zip(self.ops, self.factors[1:]):
            parts += [op, str(f)]
        body = " ".join(parts)
        return body if self.coef is None else f"{self.coef} {body}"


@dataclass(frozen=True)
class Sum:
    """Signed terms; ``signs[i]`` is ``+1`` or ``-1``."""

    terms: tuple[Term, ...]
    signs: tuple[int, ...]

    def __str__(self) -> str:
        out = ("-" if self.signs[0] < 0 else "") + str(self.terms[0])
        for sg, t in zip(self.signs[1:], self.terms[1:]):
            out += (" - " if sg < 0 else " + ") + str(t)
        return out


AstNode = Sum


def print_expression(node: AstNode) -> str:
    return str(node)


# ---------------------------------------------------------------------------
# parser

_ATOMS = ("x", "s", "t", "t'", "c", "d", "c'", "d'")
_PAIR_COLORED = ("s", "t", "t'")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- scanning ----------------------------------------------------------

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, (self.pos if pos is None else pos) + 1)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.accept(ch):
            raise self.error(f"expected {ch!r}")

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start : self.pos]
        if digits in ("", "-"):
            self.pos = start
            raise self.error("expected an integer")
        return int(digits)

    def label(self) -> str:
        """A token name: anything up to ``,`` ``)`` or whitespace."""
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ",()" and not self.text[self.pos].isspace():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a token name")
        return self.text[start : self.pos]

    def word(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "'"):
            self.pos += 1
        return self.text[start : self.pos]

    # -- grammar -----------------------------------------------------------

    def parse(self) -> Sum:
        node = self.expr()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self) -> Sum:
        signs = [-1 if self.accept("-") else 1]
        terms = [self.term()]
        while self.peek() in ("+", "-"):
            signs.append(1 if self.text[self.pos] == "+" else -1)
            self.pos += 1
            terms.append(self.term())
        return Sum(tuple(terms), tuple(signs))

    def term(self) -> Term:
        coef = None
        if self.peek().isdigit():
            num = self.integer()
            den = 1
            if self.accept("/"):
                at = self.pos
                den = self.integer()
                if den == 0:
                    raise self.error("zero denominator", at)
            coef = Fraction(num, den)
        factors = [self.factor()]
        ops: list[str] = []
        while self.peek() in ("*", "#"):
            ops.append(self.text[self.pos])
            self.pos += 1
            factors.append(self.factor())
        return Term(coef, tuple(factors), tuple(ops))

    def factor(self):
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return Group(inner)
        return self.atom()

    def atom(self) -> Atom:
        self.skip()
        start = self.pos
        name = self.word()
        if not name:
            raise self.error("expected an atom or '('")
        column = start + 1
        if name == "id":
            self.expect("(")
            letters = []
            while self.peek() in ("+", "-"):
                sign = 1 if self.text[self.pos] == "+" else -1
                self.pos += 1
                letters.append((sign, self.integer() if self.accept("@") else None))
            self.expect(")")
            return Atom("id", tuple(letters), None, column)
        if name == "tok":
            self.expect("(")
            args: tuple = (self.label(),)
            self.expect(")")
        elif name == "sq":
            self.expect("(")
            r = self.integer()
            self.expect(",")
            args = (r, self.label())
            self.expect(")")
            at = self.pos
            tail = self.word()
            if tail not in ("cup", "cap"):
                raise self.error("expected 'cup' or 'cap'", at)
            name = "sq" + tail
        elif name in _ATOMS:
            args = ()
        else:
            raise UnknownToken(f"unknown generator {name!r}", column)
        color = None
        if self.accept("@"):
            if name in _PAIR_COLORED:
                self.expect("(")
                i = self.integer()
                self.expect(",")
                j = self.integer()
                self.expect(")")
                color = (i, j)
            else:
                color = self.integer()
        return Atom(name, args, color, column)


def parse_expression(text: str) -> AstNode:
    """Parse DSL text; raises :class:`ParseError` or :class:`UnknownToken`."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# elaboration


def _check_color(F: FrobeniusAlgebra, color, column: int) -> None:
    cols = color if isinstance(color, tuple) else (color,)
    for c in cols:
        if c is not None and not (F.partitioned and 1 <= c <= F.n_colors):
            raise UnknownColor(f"color {c} is not a component of {F.name}", column)


def _atom_expr(a: Atom, F: FrobeniusAlgebra) -> MorphismExpr:
    _check_color(F, a.color, a.column)
    if a.name == "id":
        for _, c in a.args:
            _check_color(F, c, a.column)
        return identity(tuple(Letter(s, c) for s, c in a.args))
    pair = a.color if isinstance(a.color, tuple) else (None, None)
    one = None if isinstance(a.color, tuple) else a.color
    if a.name in ("tok", "sqcup", "sqcap"):
        name = a.args[-1]
        try:
            f = F.named(name)
        except KeyError:
            raise UnknownToken(f"unknown token {name!r} for {F.name}", a.column) from None
        if a.name == "tok":
            return token(F, f, up(one))
        if a.args[0] < 0:
            raise ParseError("decoration index must be nonnegative", a.column)
        return (sq_cup if a.name == "sqcup" else sq_cap)(F, a.args[0], f, one)
    boxes = {
        "x": lambda: dot_box(up(one)),
        "s": lambda: s_box(*pair),
        "t": lambda: t_box(*pair),
        "t'": lambda: tp_box(*pair),
        "c": lambda: c_box(one),
        "d": lambda: d_box(one),
        "c'": lambda: cp_box(one),
        "d'": lambda: dp_box(one),
    }
    return from_box(boxes[a.name]())


def elaborate(node, F: FrobeniusAlgebra) -> MorphismExpr:
    """The morphism denoted by a syntax tree over ``F``."""
    if isinstance(node, Atom):
        return _atom_expr(node, F)
    if isinstance(node, Group):
        return elaborate(node.expr, F)
    if isinstance(node, Term):
        acc = elaborate(node.factors[0], F)
        for op, f in zip(node.ops, node.factors[1:]):
            rhs = elaborate(f, F)
            acc = compose(acc, rhs) if op == "*" else tensor(acc, rhs)
        return acc if node.coef is None else acc.scale(node.coef)
    acc = None
    for sg, t in zip(node.signs, node.terms):
        m = elaborate(t, F)
        m = m if sg > 0 else -m
        acc = m if acc is None else acc + m
    return acc


def parse_morphism(text: str, F: FrobeniusAlgebra) -> MorphismExpr:
    return elaborate(parse_expression(text), F)


# ---------------------------------------------------------------------------
# commands

CATEGORIES = {"heis": HEIS, "heis-prime": HEIS_PRIME, "heis-dd": HEIS_DOUBLE_PRIME, "heis-alt": HEIS_ALT}

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN = 0, 1, 2


def load_algebra(spec: str) -> FrobeniusAlgebra:
    """A fleet name such as ``k+k`` or the path of an algebra file."""
    named = fleet()
    if spec in named:
        return named[spec]
    with open(spec, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), name=os.path.splitext(os.path.basename(spec))[0])


def _report_status(rep: Report) -> int:
    if rep.passed:
        return EXIT_OK
    if any(r.verdict == Verdict.NONZERO for r in rep.results):
        return EXIT_FAIL
    return EXIT_UNKNOWN


def _expressions(args, count: int) -> list[str]:
    exprs = list(args.exprs)
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            exprs += [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if len(exprs) != count:
        raise SystemExit(f"expected {count} expression(s), got {len(exprs)}")
    return exprs


def _cmd_normalize(args, F, out) -> int:
    (text,) = _expressions(args, 1)
    P = build_presentation(CATEGORIES[args.cat], F, args.k)
    m = parse_morphism(text, F)
    try:
        res = normalize_full(m, P.rules, args.budget)
    except BudgetExhausted as exc:
        print(f"partial: {exc.partial!r}", file=out)
        print(f"rule normalize: {Verdict.UNKNOWN} ({exc.steps} steps)", file=out)
        return EXIT_UNKNOWN
    print(repr(res.expr), file=out)
    print(f"steps: {res.steps}", file=out)
    print(f"spanning form: {'yes' if res.spanning_form else 'no'}", file=out)
    return EXIT_OK


def _cmd_check_equal(args, F, out) -> int:
    a, b = _expressions(args, 2)
    P = build_presentation(CATEGORIES[args.cat], F, args.k)
    verdict, steps = zero_check(parse_morphism(a, F) - parse_morphism(b, F), P.rules, args.budget)
    print(RelationResult("check-equal", verdict, steps).line(), file=out)
    print(verdict, file=out)
    return {Verdict.ZERO: EXIT_OK, Verdict.NONZERO: EXIT_FAIL}.get(verdict, EXIT_UNKNOWN)


def _print_report(rep: Report, out) -> int:
    print(rep.title, file=out)
    for line in rep.lines():
        print(line, file=out)
    status = _report_status(rep)
    print({EXIT_OK: "PASS", EXIT_FAIL: "FAIL", EXIT_UNKNOWN: "UNKNOWN"}[status], file=out)
    return status


def _cmd_verify_presentation(args, F, out) -> int:
    return _print_report(verify_presentation(build_presentation(CATEGORIES[args.cat], F, args.k), args.budget), out)


def _cmd_verify_functor(args, F, out) -> int:
    return _print_report(verify_functor(build_functor(args.functor, F, args.k), args.budget), out)


def _cmd_roundtrip(args, F, out) -> int:
    a, b = args.pair.split(",")
    phi, psi = build_functor(a, F, args.k), build_functor(b, F, args.k)
    status = EXIT_OK
    for first, second in ((phi, psi), (psi, phi)):
        status = max(status, _print_report(roundtrip_report(first, second, args.budget), out))
    return status


def _cmd_bubble_eval(args, F, out) -> int:
    f = F.named(args.token)
    if args.color is not None:
        _check_color(F, args.color, 0)
    sym = BubbleSymbol(CCW if args.ccw else CW, args.dots, f, args.color, args.k)
    print(repr(bubble_value(sym)), file=out)
    return EXIT_OK


def _cmd_grassmannian(args, F, out) -> int:
    bad = 0
    for label, rep in grassmannian_sweep(F, args.k, args.max_t):
        if not rep.ok:
            bad += 1
            print(f"{label}: FAIL {rep.diff()}", file=out)
        elif args.verbose:
            print(f"{label}: ok", file=out)
    print("PASS" if not bad else f"FAIL ({bad} cases)", file=out)
    return EXIT_OK if not bad else EXIT_FAIL


def _cmd_color_sort(args, F, out) -> int:
    obj = PKObject.parse(args.object)
    pk = PartialKaroubi(F, args.k, budget=args.budget)
    target, iso, _ = pk.color_sort(obj)
    print(f"sorted: {target}", file=out)
    print(f"iso: {iso!r}", file=out)
    fwd, back = pk.check_sort(obj, args.budget)
    print(f"rule inverse-after: {fwd}", file=out)
    print(f"rule inverse-before: {back}", file=out)
    if fwd == back == Verdict.ZERO:
        return EXIT_OK
    return EXIT_FAIL if Verdict.NONZERO in (fwd, back) else EXIT_UNKNOWN


def _cmd_split(args, F, out) -> int:
    (text,) = _expressions(args, 1)
    pk = PartialKaroubi(F, args.k, budget=args.budget)
    src, dst = PKObject.parse(args.src), PKObject.parse(args.dst)
    res = pk.split(parse_morphism(text, F), src, dst, args.budget)
    if isinstance(res, SplitUnknown):
        print(f"{Verdict.UNKNOWN}: {res.reason}", file=out)
        return EXIT_UNKNOWN
    print(repr(res), file=out)
    return EXIT_OK


def _cmd_awpa_mul(args, F, out) -> int:
    a, b = _expressions(args, 2)
    x: AwpaElement = awpa_from_diagram(parse_morphism(a, F), F)
    y: AwpaElement = awpa_from_diagram(parse_morphism(b, F), F)
    print(repr(awpa_mul(x, y)), file=out)
    return EXIT_OK


_COMMANDS = {
    "normalize": _cmd_normalize,
    "check-equal": _cmd_check_equal,
    "verify-presentation": _cmd_verify_presentation,
    "verify-functor": _cmd_verify_functor,
    "roundtrip": _cmd_roundtrip,
    "bubble-eval": _cmd_bubble_eval,
    "grassmannian": _cmd_grassmannian,
    "color-sort": _cmd_color_sort,
    "split": _cmd_split,
    "awpa-mul": _cmd_awpa_mul,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", default="k", help="fleet name (k, k+k, k[x]/x2, ...) or algebra file")
    common.add_argument("--k", type=int, default=0, help="central charge")
    common.add_argument("--budget", type=int, default=20000, help="rewrite step budget")

    def with_exprs(p, n):
        p.add_argument("exprs", nargs="*", metavar="EXPR", help=f"{n} DSL expression(s)")
        p.add_argument("--file", help="read expressions from a file, one per line")

    def with_cat(p):
        p.add_argument("--cat", choices=sorted(CATEGORIES), default="heis")

    ap = argparse.ArgumentParser(prog="heisfrob", description="Symbolic computation in Frobenius Heisenberg categories.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("normalize", parents=[common], help="normal form of an expression")
    with_exprs(p, 1)
    with_cat(p)
    p = sub.add_parser("check-equal", parents=[common], help="decide whether two expressions are equal")
    with_exprs(p, 2)
    with_cat(p)
    p = sub.add_parser("verify-presentation", parents=[common], help="zero-check every defining relation")
    with_cat(p)
    p = sub.add_parser("verify-functor", parents=[common], help="check that a functor respects relations")
    p.add_argument("functor", choices=FUNCTOR_NAMES)
    p = sub.add_parser("roundtrip", parents=[common], help="check two functors are mutually inverse on generators")
    p.add_argument("--pair", default="F,G", help="two functor names, e.g. F,G or A,B")
    p = sub.add_parser("bubble-eval", parents=[common], help="value of a dotted bubble")
    orient = p.add_mutually_exclusive_group()
    orient.add_argument("--cw", action="store_true", help="clockwise (default)")
    orient.add_argument("--ccw", action="store_true", help="counterclockwise")
    p.add_argument("--dots", type=int, default=0)
    p.add_argument("--token", default="1", help="token name")
    p.add_argument("--color", type=int, default=None)
    p = sub.add_parser("grassmannian", parents=[common], help="check the infinite Grassmannian relation")
    p.add_argument("--max-t", type=int, default=6)
    p.add_argument("--verbose", action="store_true")
    p = sub.add_parser("color-sort", parents=[common], help="sort an object by color and check the isomorphism")
    p.add_argument("object", help='object such as "+2 -1 +1"')
    p = sub.add_parser("split", parents=[common], help="split a morphism into color blocks")
    with_exprs(p, 1)
    p.add_argument("--src", required=True, help="sorted source object")
    p.add_argument("--dst", required=True, help="sorted target object")
    p = sub.add_parser("awpa-mul", parents=[common], help="multiply two upward diagrams in normal form")
    with_exprs(p, 2)
    return ap


def run_command(argv: Sequence[str], out=None) -> int:
    """Run one command; returns the exit status."""
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(list(argv))
    try:
        F = load_algebra(args.algebra)
        return _COMMANDS[args.command](args, F, out)
    except DslError as exc:
        print(f"{type(exc).__name__}: {exc}", file=out)
    except (BoundaryMismatch, NotPositivePart, FrobeniusError, OSError, KeyError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=out)
    return EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


__all__ = [
    "Atom",
    "AstNode",
    "DslError",
    "Group",
    "ParseError",
    "Sum",
    "Term",
    "UnknownColor",
    "UnknownToken",
    "elaborate",
    "load_algebra",
    "main",
    "parse_expression",
    "parse_morphism",
    "print_expression",
    "run_command",
]
