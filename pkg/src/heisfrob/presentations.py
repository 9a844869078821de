"""The Heisenberg presentations as data, the functors between them, and checks.

Four presentations are modelled, all over the same algebra ``F`` and central
charge ``k``:

``Heis``
    uncolored, generated by ``x, β_f, s, c, d``, the inverse crossing ``t'``
    and the decorated left cups (``k > 0``) or caps (``k < 0``).
``HeisPrime``
    the colored version of ``Heis``: every strand carries a color ``i`` and
    tokens from ``F_i``.
``HeisAlt``
    uncolored, generated by ``x, β_f, s, c, d, c', d'``.
``HeisDoublePrime``
    the colored version of ``HeisAlt``.

Each presentation lists its defining relations as concrete instances (all
colors, basis elements and dot counts expanded).  Functors are given by their
images on generating boxes and applied strand by strand, so that colors flow
along the diagram.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .bubbles import CCW, CW, BubbleSymbol, bubble_value
from .diagram import (
    Box,
    DiagramTerm,
    Letter,
    MorphismExpr,
    bubble_box,
    c_box,
    compose,
    cp_box,
    d_box,
    dot_box,
    dp_box,
    from_box,
    identity,
    s_box,
    sqcap_box,
    sqcup_box,
    t_box,
    tensor,
    token,
    tp_box,
)
from .frobenius import AlgebraElement, FrobeniusAlgebra
from .rewrite import RuleSet, Verdict, normalize_full, BudgetExhausted
from .rules import build_rules

HEIS = "Heis"
HEIS_PRIME = "HeisPrime"
HEIS_DOUBLE_PRIME = "HeisDoublePrime"
HEIS_ALT = "HeisAlt"
PRESENTATION_IDS = (HEIS, HEIS_PRIME, HEIS_DOUBLE_PRIME, HEIS_ALT)

_COLORED = {HEIS_PRIME, HEIS_DOUBLE_PRIME}
_ALTERNATE = {HEIS_ALT, HEIS_DOUBLE_PRIME}


class MissingPartition(ValueError):
    """A colored presentation was requested over an algebra without a partition."""


class GeneratorNotInSource(ValueError):
    """A functor met a box that is not a generator of its source."""


class UnknownPresentation(ValueError):
    pass


# ---------------------------------------------------------------------------
# stacking helper


class Stack:
    """Build a diagram bottom to top by placing generators at offsets."""

    def __init__(self, F: FrobeniusAlgebra, dom: Sequence[Letter]):
        self.F = F
        self.word = list(dom)
        self.expr = identity(tuple(dom))

    def _put(self, off: int, piece: MorphismExpr) -> "Stack":
        n = len(piece.dom)
        left = identity(tuple(self.word[:off]))
        right = identity(tuple(self.word[off + n :]))
        self.expr = compose(tensor(tensor(left, piece), right), self.expr)
        self.word = self.word[:off] + list(piece.cod) + self.word[off + n :]
        return self

    def box(self, off: int, box: Box) -> "Stack":
        return self._put(off, from_box(box))

    def expr_at(self, off: int, piece: MorphismExpr) -> "Stack":
        return self._put(off, piece)

    def col(self, p: int):
        return self.word[p].color

    def s(self, p: int) -> "Stack":
        return self.box(p, s_box(self.col(p), self.col(p + 1)))

    def t(self, p: int) -> "Stack":
        return self.box(p, t_box(self.col(p), self.col(p + 1)))

    def tp(self, p: int) -> "Stack":
        return self.box(p, tp_box(self.col(p), self.col(p + 1)))

    def c(self, p: int, i=None) -> "Stack":
        return self.box(p, c_box(i))

    def cp(self, p: int, i=None) -> "Stack":
        return self.box(p, cp_box(i))

    def d(self, p: int) -> "Stack":
        return self.box(p, d_box(self.col(p)))

    def dp(self, p: int) -> "Stack":
        return self.box(p, dp_box(self.col(p)))

    def x(self, p: int, n: int = 1) -> "Stack":
        if n == 0:
            return self
        return self.box(p, dot_box(self.word[p], n))

    def tok(self, p: int, f) -> "Stack":
        return self._put(p, token(self.F, f, self.word[p]))

    def sqcup(self, p: int, r: int, b: int, i=None) -> "Stack":
        return self.box(p, sqcup_box(r, b, i))

    def sqcap(self, p: int, r: int, b: int) -> "Stack":
        return self.box(p, sqcap_box(r, b, self.col(p)))

    def bub(self, p: int, sym: BubbleSymbol) -> "Stack":
        return self.box(p, bubble_box(sym))

    def scale(self, c) -> MorphismExpr:
        return self.expr.scale(c)

    @property
    def e(self) -> MorphismExpr:
        return self.expr


def U(c=None) -> Letter:
    return Letter(1, c)


def D(c=None) -> Letter:
    return Letter(-1, c)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: MorphismExpr
    rhs: MorphismExpr
    source: str = ""

    @property
    def difference(self) -> MorphismExpr:
        return self.lhs - self.rhs


@dataclass
class PresentationSpec:
    ident: str
    algebra: FrobeniusAlgebra
    k: int
    colored: bool
    alternate: bool
    generators: tuple[str, ...]
    rules: RuleSet
    relations: tuple[Relation, ...] = ()

    @property
    def colors(self) -> list:
        return list(range(1, self.algebra.n_colors + 1)) if self.colored else [None]

    def basis(self, i) -> tuple[int, ...]:
        return self.algebra.component_basis(i)

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def generator_instances(self) -> list[MorphismExpr]:
        """One morphism per concrete generator (colors and labels expanded)."""
        F, k = self.algebra, self.k
        out: list[MorphismExpr] = []
        cols = self.colors
        for i in cols:
            out.append(from_box(dot_box(U(i))))
            for b in self.basis(i):
                out.append(token(F, b, U(i)))
            out += [from_box(c_box(i)), from_box(d_box(i))]
            if self.alternate:
                out += [from_box(cp_box(i)), from_box(dp_box(i))]
            else:
                for r in range(max(k, 0)):
                    out += [from_box(sqcup_box(r, b, i)) for b in self.basis(i)]
                for r in range(max(-k, 0)):
                    out += [from_box(sqcap_box(r, b, i)) for b in self.basis(i)]
            for j in cols:
                out.append(from_box(s_box(i, j)))
                out.append(from_box(t_box(i, j)))
                out.append(from_box(tp_box(i, j)))
        return out


_GENERATORS = {
    HEIS: ("x", "tok", "s", "c", "d", "t", "tp", "sqcup", "sqcap"),
    HEIS_PRIME: ("x", "tok", "s", "c", "d", "t", "tp", "sqcup", "sqcap"),
    HEIS_ALT: ("x", "tok", "s", "c", "d", "cp", "dp", "t", "tp", "bub"),
    HEIS_DOUBLE_PRIME: ("x", "tok", "s", "c", "d", "cp", "dp", "t", "tp", "bub"),
}

_CACHE: dict = {}


def build_presentation(ident: str, F: FrobeniusAlgebra, k: int) -> PresentationSpec:
    """Materialize a presentation with its rule set and relation instances."""
    if ident not in PRESENTATION_IDS:
        raise UnknownPresentation(f"unknown presentation {ident!r}; expected one of {PRESENTATION_IDS}")
    colored = ident in _COLORED
    if colored and not F.partitioned:
        raise MissingPartition(f"{ident} needs a partitioned algebra; {F.name} has none")
    key = (ident, id(F), k)
    hit = _CACHE.get(key)
    if hit is not None and hit.algebra is F:
        return hit
    alternate = ident in _ALTERNATE
    rs = build_rules(F, k, colored=colored, alternate=alternate, name=f"{ident}[{F.name}, k={k}]")
    spec = PresentationSpec(ident, F, k, colored, alternate, _GENERATORS[ident], rs)
    rels = _alt_relations(spec) if alternate else _def_relations(spec)
    spec.relations = tuple(rels)
    rs.scripts = tuple(lemma_scripts(spec)) if ident == HEIS else ()
    _CACHE[key] = spec
    return spec


# -- shared relation families ------------------------------------------------


def _wreath_relations(P: PresentationSpec) -> list[Relation]:
    F = P.algebra
    out = []
    src = "affine wreath product relation"
    cols = P.colors
    for i in cols:
        B = P.basis(i)
        unit = F.one if i is None else F.idempotent(i)
        out.append(Relation(f"token-unit[{i}]", Stack(F, [U(i)]).tok(0, unit).e, identity((U(i),)), src))
        for a in B:
            for b in B:
                lhs = Stack(F, [U(i)]).tok(0, b).tok(0, a).e
                rhs = Stack(F, [U(i)]).tok(0, F.basis_element(a) * F.basis_element(b)).e
                out.append(Relation(f"token-homomorphism[{i};{a},{b}]", lhs, rhs, src))
            lhs = Stack(F, [U(i)]).tok(0, a).x(0).e
            rhs = Stack(F, [U(i)]).x(0).tok(0, a).e
            out.append(Relation(f"dot-token[{i};{a}]", lhs, rhs, src))
    for i in cols:
        for j in cols:
            dom = [U(i), U(j)]
            out.append(Relation(f"doublecross-up[{i},{j}]", Stack(F, dom).s(0).s(0).e, identity(tuple(dom)), src))
            for a in P.basis(i):
                lhs = Stack(F, dom).tok(0, a).s(0).e
                rhs = Stack(F, dom).s(0).tok(1, a).e
                out.append(Relation(f"tokenslide-up-right[{i},{j};{a}]", lhs, rhs, src))
            for a in P.basis(j):
                lhs = Stack(F, dom).tok(1, a).s(0).e
                rhs = Stack(F, dom).s(0).tok(0, a).e
                out.append(Relation(f"tokenslide-up-left[{i},{j};{a}]", lhs, rhs, src))
            corr = MorphismExpr.zero(tuple(dom), (U(j), U(i)))
            corr2 = MorphismExpr.zero(tuple(dom), (U(j), U(i)))
            if i == j:
                for b in P.basis(i):
                    dual = AlgebraElement(F, F.dual_coords(b))
                    corr = corr + Stack(F, dom).tok(0, dual).tok(1, b).e
                    corr2 = corr2 + Stack(F, dom).tok(0, b).tok(1, dual).e
            lhs = Stack(F, dom).s(0).x(0).e - Stack(F, dom).x(1).s(0).e
            out.append(Relation(f"dotslide-1[{i},{j}]", lhs, corr, src))
            lhs = Stack(F, dom).x(0).s(0).e - Stack(F, dom).s(0).x(1).e
            out.append(Relation(f"dotslide-2[{i},{j}]", lhs, corr2, src))
            for l in cols:
                dom3 = [U(i), U(j), U(l)]
                lhs = Stack(F, dom3).s(1).s(0).s(1).e
                rhs = Stack(F, dom3).s(0).s(1).s(0).e
                out.append(Relation(f"braid[{i},{j},{l}]", lhs, rhs, src))
    return out


def _adjunction_relations(P: PresentationSpec) -> list[Relation]:
    F = P.algebra
    out = []
    for i in P.colors:
        lhs = Stack(F, [U(i)]).c(1, i).d(0).e
        out.append(Relation(f"right-adjunction-up[{i}]", lhs, identity((U(i),)), "right adjunction"))
        lhs = Stack(F, [D(i)]).c(0, i).d(1).e
        out.append(Relation(f"right-adjunction-down[{i}]", lhs, identity((D(i),)), "right adjunction"))
    return out


def _dual(F: FrobeniusAlgebra, b: int) -> AlgebraElement:
    return AlgebraElement(F, F.dual_coords(b))


# -- the presentation with decorated cups and caps ---------------------------


def _def_relations(P: PresentationSpec) -> list[Relation]:
    F, k = P.algebra, P.k
    out = _wreath_relations(P) + _adjunction_relations(P)
    src = "inversion relation"
    cols = P.colors
    for i in cols:
        for j in cols:
            # up-down double crossing
            dom = (U(i), D(j))
            rhs = Stack(F, dom).t(0).tp(0).e
            if i == j:
                for r in range(max(k, 0)):
                    for b in P.basis(i):
                        rhs = rhs + Stack(F, dom).x(0, r).tok(0, _dual(F, b)).d(0).sqcup(0, r, b, i).e
            out.append(Relation(f"up-down-doublecross[{i},{j}]", identity(dom), rhs, src))
            dom = (D(i), U(j))
            rhs = Stack(F, dom).tp(0).t(0).e
            if i == j:
                for r in range(max(-k, 0)):
                    for b in P.basis(i):
                        rhs = rhs + Stack(F, dom).sqcap(0, r, b).c(0, i).x(1, r).tok(1, _dual(F, b)).e
            out.append(Relation(f"down-up-doublecross[{i},{j}]", identity(dom), rhs, src))
    if k > 0:
        for i in cols:
            for j in cols:
                dom = (D(i), U(j))
                out.append(Relation(f"inversion-1[{i},{j}]", identity(dom), Stack(F, dom).tp(0).t(0).e, src))
        for i in cols:
            for r in range(k):
                for b in P.basis(i):
                    lhs = Stack(F, ()).sqcup(0, r, b, i).t(0).e
                    out.append(Relation(f"inversion-2-cup[{i};{r},{b}]", lhs, MorphismExpr.zero((), (D(i), U(i))), src))
                    lhs = Stack(F, (D(i), U(i))).tp(0).x(0, r).tok(0, _dual(F, b)).d(0).e
                    out.append(Relation(f"inversion-2-cap[{i};{r},{b}]", lhs, MorphismExpr.zero((D(i), U(i)), ()), src))
                    for s in range(k):
                        for c in P.basis(i):
                            lhs = Stack(F, ()).sqcup(0, s, c, i).x(0, r).tok(1, _dual(F, b)).d(0).e
                            val = Fraction(int(r == s and b == c))
                            out.append(Relation(f"inversion-3[{i};{r},{b};{s},{c}]", lhs, identity(()).scale(val), src))
    if k < 0:
        for i in cols:
            for j in cols:
                dom = (U(i), D(j))
                out.append(Relation(f"inversion-1[{i},{j}]", identity(dom), Stack(F, dom).t(0).tp(0).e, src))
        for i in cols:
            for r in range(-k):
                for b in P.basis(i):
                    lhs = Stack(F, (U(i), D(i))).t(0).sqcap(0, r, b).e
                    out.append(Relation(f"inversion-2-cap[{i};{r},{b}]", lhs, MorphismExpr.zero((U(i), D(i)), ()), src))
                    lhs = Stack(F, ()).c(0, i).x(1, r).tok(1, _dual(F, b)).tp(0).e
                    out.append(Relation(f"inversion-2-cup[{i};{r},{b}]", lhs, MorphismExpr.zero((), (U(i), D(i))), src))
                    for s in range(-k):
                        for c in P.basis(i):
                            lhs = Stack(F, ()).c(0, i).x(1, r).tok(0, _dual(F, b)).sqcap(0, s, c).e
                            val = Fraction(int(r == s and b == c))
                            out.append(Relation(f"inversion-3[{i};{r},{b};{s},{c}]", lhs, identity(()).scale(val), src))
    return out


# -- the presentation with left cups and caps --------------------------------


def _alt_relations(P: PresentationSpec) -> list[Relation]:
    F, k = P.algebra, P.k
    out = _wreath_relations(P) + _adjunction_relations(P)
    src = "left cup and cap relation"
    cols = P.colors
    for i in cols:
        for j in cols:
            dom = (U(i), D(j))
            rhs = identity(dom)
            if i == j:
                for r in range(max(k, 0)):
                    for s in range(max(k - r, 0)):
                        for a in P.basis(i):
                            for b in P.basis(i):
                                f = _dual(F, a) * F.basis_element(b)
                                if f.is_zero():
                                    continue
                                sym = BubbleSymbol(CCW, -r - s - 2, f, i, k)
                                rhs = rhs + (
                                    Stack(F, dom).tok(0, _dual(F, b)).x(0, r).d(0)
                                    .bub(0, sym).cp(0, i).x(1, s).tok(0, a).e
                                )
            out.append(Relation(f"doublecross-up-down[{i},{j}]", Stack(F, dom).t(0).tp(0).e, rhs, src))
            dom = (D(i), U(j))
            rhs = identity(dom)
            if i == j:
                for r in range(max(-k, 0)):
                    for s in range(max(-k - r, 0)):
                        for a in P.basis(i):
                            for b in P.basis(i):
                                f = _dual(F, a) * F.basis_element(b)
                                if f.is_zero():
                                    continue
                                sym = BubbleSymbol(CW, -r - s - 2, f, i, k)
                                rhs = rhs + (
                                    Stack(F, dom).tok(0, a).x(1, s).dp(0)
                                    .bub(0, sym).c(0, i).x(1, r).tok(1, _dual(F, b)).e
                                )
            out.append(Relation(f"doublecross-down-up[{i},{j}]", Stack(F, dom).tp(0).t(0).e, rhs, src))
    for i in cols:
        dom = (U(i),)
        if k >= 0:
            lhs = Stack(F, dom).cp(1, i).s(0).d(1).e
            out.append(Relation(f"right-curl[{i}]", lhs, identity(dom).scale(int(k == 0)), src))
        if k <= 0:
            lhs = Stack(F, dom).c(0, i).s(1).dp(0).e
            out.append(Relation(f"left-curl[{i}]", lhs, identity(dom).scale(int(k == 0)), src))
        for r in range(max(k, 0)):
            for b in P.basis(i):
                lhs = Stack(F, ()).cp(0, i).tok(0, b).x(0, r).d(0).e
                val = -F.basis_element(b).trace() if r == k - 1 else Fraction(0)
                out.append(Relation(f"clockwise-circle[{i};{r},{b}]", lhs, identity(()).scale(val), src))
        for r in range(max(-k, 0)):
            for b in P.basis(i):
                lhs = Stack(F, ()).c(0, i).tok(1, b).x(1, r).dp(0).e
                val = F.basis_element(b).trace() if r == -k - 1 else Fraction(0)
                out.append(Relation(f"counterclockwise-circle[{i};{r},{b}]", lhs, identity(()).scale(val), src))
    return out


# ---------------------------------------------------------------------------
# checking


@dataclass
class RelationResult:
    name: str
    verdict: str
    steps: int

    def line(self) -> str:
        return f"rule {self.name}: {self.verdict} ({self.steps} steps)"


@dataclass
class Report:
    title: str
    results: list[RelationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict == Verdict.ZERO for r in self.results)

    @property
    def unknown(self) -> bool:
        return any(r.verdict == Verdict.UNKNOWN for r in self.results)

    def failures(self) -> list[RelationResult]:
        return [r for r in self.results if r.verdict != Verdict.ZERO]

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        return "\n".join([self.title] + self.lines())


def zero_check(m: MorphismExpr, rs: RuleSet, budget: int) -> tuple[str, int]:
    try:
        res = normalize_full(m, rs, budget)
    except BudgetExhausted as exc:
        return Verdict.UNKNOWN, exc.steps
    return (Verdict.ZERO if res.expr.is_zero() else Verdict.NONZERO), res.steps


def verify_presentation(P: PresentationSpec, budget: int = 20000, names: Iterable[str] | None = None) -> Report:
    """Zero-check ``lhs - rhs`` of every defining relation under the rule set."""
    wanted = set(names) if names is not None else None
    rep = Report(f"presentation {P.ident} over {P.algebra.name}, k={P.k}")
    for rel in P.relations:
        if wanted is not None and rel.name not in wanted:
            continue
        verdict, steps = zero_check(rel.difference, P.rules, budget)
        rep.results.append(RelationResult(rel.name, verdict, steps))
    return rep


# ---------------------------------------------------------------------------
# functors

BoxImage = Callable[[Box, tuple], MorphismExpr]


@dataclass
class FunctorSpec:
    """A strict monoidal functor given by the images of generating boxes.

    ``box_image(box, dom)`` returns the image of ``box`` whose source strands
    already carry the target letters ``dom``.  Cups see ``dom = ()``.
    """

    name: str
    source: PresentationSpec
    target: PresentationSpec
    box_image: BoxImage
    wire_image: Callable[[Letter], list[tuple[Letter, MorphismExpr | None]]]
    description: dict[str, str] = field(default_factory=dict)

    def corrupted(self, name: str, drop: Callable[[Box], bool]) -> "FunctorSpec":
        """A copy whose images lose every term containing a box selected by ``drop``."""
        inner = self.box_image

        def image(box, dom):
            out = inner(box, dom)
            keep = {t: c for t, c in out.terms.items() if not any(drop(bx) for _, bx in t.boxes)}
            return MorphismExpr(keep, out.dom, out.cod)

        return FunctorSpec(name, self.source, self.target, image, self.wire_image, dict(self.description))


def bubble_loop(sym: BubbleSymbol, F: FrobeniusAlgebra) -> MorphismExpr:
    """The closed loop that a bubble symbol abbreviates."""
    i = sym.color
    if sym.orientation == CW:
        return Stack(F, ()).cp(0, i).tok(0, sym.token).x(0, sym.dots).d(0).e
    return Stack(F, ()).c(0, i).tok(1, sym.token).x(1, sym.dots).dp(0).e


def _desugar_bubbles(m: MorphismExpr, F: FrobeniusAlgebra) -> MorphismExpr:
    """Replace bubble boxes and bubble factors by the loops they stand for."""
    acc = MorphismExpr.zero(m.dom, m.cod)
    for term, coef in m.terms.items():
        if not term.bubbles and not any(b.kind == "bub" for _, b in term.boxes):
            acc = acc + MorphismExpr.of(term, coef)
            continue
        st = Stack(F, term.dom)
        for off, box in term.boxes:
            if box.kind == "bub":
                st.expr_at(off, _bubble_expr(box.params[0], F))
            else:
                st.box(off, box)
        e = st.e
        for sym in term.bubbles:
            e = tensor(e, _bubble_expr(sym, F))
        acc = acc + e.scale(coef)
    return acc


def _bubble_expr(sym: BubbleSymbol, F: FrobeniusAlgebra) -> MorphismExpr:
    poly = bubble_value(sym)
    out = MorphismExpr.zero((), ())
    for mono, c in poly.terms.items():
        e = identity(())
        for s in mono:
            e = tensor(e, bubble_loop(s, F))
        out = out + e.scale(c)
    return out


def apply_functor(phi: FunctorSpec, m: MorphismExpr) -> MorphismExpr:
    """Substitute generator images box by box, following colors along strands."""
    F = phi.source.algebra
    allowed = set(phi.source.generators)
    m = _desugar_bubbles(m, F) if "bub" in allowed else m
    for term in m.terms:
        if term.bubbles:
            raise GeneratorNotInSource(f"bubble factors are not generators of {phi.source.ident}")
        for _, box in term.boxes:
            if box.kind not in allowed:
                raise GeneratorNotInSource(f"{box.kind} is not a generator of {phi.source.ident}")
            if box.kind == "sqcup" and phi.source.k <= 0 or box.kind == "sqcap" and phi.source.k >= 0:
                raise GeneratorNotInSource(f"{box.kind} is not a generator of {phi.source.ident} at k={phi.source.k}")
    out: MorphismExpr | None = None
    for term, coef in m.terms.items():
        img = _apply_term(phi, term).scale(coef)
        out = img if out is None else out + img
    if out is None:
        dom = _image_word(phi, m.dom)
        cod = _image_word(phi, m.cod)
        return MorphismExpr.zero(dom, cod)
    return out


def _image_word(phi: FunctorSpec, w) -> tuple:
    return tuple(l.uncolored() for l in w)


def _apply_term(phi: FunctorSpec, term: DiagramTerm) -> MorphismExpr:
    # start with every coloring of the domain wires
    choices = [phi.wire_image(l) for l in term.dom]
    partial: list[MorphismExpr] = []
    for combo in itertools.product(*choices):
        w = tuple(l for l, _ in combo)
        e = identity(w)
        for pos, (l, pre) in enumerate(combo):
            if pre is not None:
                e = compose(tensor(tensor(identity(w[:pos]), pre), identity(w[pos + 1 :])), e)
        partial.append(e)
    for off, box in term.boxes:
        nxt: list[MorphismExpr] = []
        for e in partial:
            for t, c in e.terms.items():
                cod = t.cod
                n = len(box.dom)
                img = phi.box_image(box, cod[off : off + n])
                if img.is_zero():
                    continue
                layer = tensor(tensor(identity(cod[:off]), img), identity(cod[off + n :]))
                nxt.append(compose(layer, MorphismExpr.of(t, c)))
        partial = nxt
    dom_img = _image_word(phi, term.dom)
    cod_img = _image_word(phi, term.cod)
    acc: dict = {}
    for e in partial:
        for t, c in e.terms.items():
            acc[t] = acc.get(t, Fraction(0)) + c
    return MorphismExpr(acc, dom_img, cod_img)


# -- colored -> uncolored ----------------------------------------------------


def _forget_colors(source: PresentationSpec, target: PresentationSpec, name: str) -> FunctorSpec:
    """``β_{(f,i)} ↦ β_f`` and every colored generator ↦ itself with ``e_i`` tokens."""
    F = source.algebra

    def e_tok(l: Letter) -> MorphismExpr:
        return token(F, F.idempotent(l.color), l.uncolored())

    def wire(l: Letter):
        return [(l.uncolored(), e_tok(l))]

    def image(box: Box, dom) -> MorphismExpr:
        kind = box.kind
        if kind == "tok":
            return token(F, box.params[0], box.dom[0].uncolored())
        if kind in ("sqcup", "sqcap"):
            r, b = box.params
            return from_box(sqcup_box(r, b) if kind == "sqcup" else sqcap_box(r, b))
        plain = Box(kind, tuple(l.uncolored() for l in box.dom), tuple(l.uncolored() for l in box.cod), box.params)
        e = from_box(plain)
        if box.dom:
            pre = identity(())
            for l in box.dom:
                pre = tensor(pre, e_tok(l))
            return compose(e, pre)
        post = identity(())
        for l in box.cod:
            post = tensor(post, e_tok(l))
        return compose(post, e)

    desc = {
        "s_{i,j}": "s with e_i, e_j tokens",
        "β_(f,i)": "β_f",
        "c_i, d_i, c'_i, d'_i, t_{i,j}, t'_{i,j}, x_i": "the uncolored generator with idempotent tokens",
        "decorated cups and caps (r, f_i)": "the uncolored decorated cup or cap (r, f_i)",
    }
    return FunctorSpec(name, source, target, image, wire, desc)


# -- uncolored -> colored ----------------------------------------------------


def _sum_colors(source: PresentationSpec, target: PresentationSpec, name: str) -> FunctorSpec:
    """Every generator ↦ the sum of its colored versions."""
    F = source.algebra
    colors = target.colors

    def wire(l: Letter):
        return [(Letter(l.sign, i), None) for i in colors]

    def image(box: Box, dom) -> MorphismExpr:
        kind = box.kind
        if kind == "tok":
            (l,) = dom
            return token(F, box.params[0], l)
        if kind == "x":
            (l,) = dom
            return from_box(dot_box(l, box.params[0]))
        if kind == "s":
            return from_box(s_box(dom[0].color, dom[1].color))
        if kind == "t":
            return from_box(t_box(dom[0].color, dom[1].color))
        if kind == "tp":
            return from_box(tp_box(dom[0].color, dom[1].color))
        if kind in ("c", "cp"):
            terms = {}
            for i in colors:
                bx = c_box(i) if kind == "c" else cp_box(i)
                terms[DiagramTerm((), ((0, bx),), canonical=True, cod=bx.cod)] = Fraction(1)
            return MorphismExpr(terms, (), tuple(l.uncolored() for l in box.cod))
        if kind == "sqcup":
            r, b = box.params
            i = F.color_of(b)
            return from_box(sqcup_box(r, b, i))
        if kind in ("d", "dp", "sqcap"):
            i, j = dom[0].color, dom[1].color
            if i != j:
                return MorphismExpr.zero(tuple(dom), ())
            if kind == "sqcap":
                r, b = box.params
                if F.color_of(b) != i:
                    return MorphismExpr.zero(tuple(dom), ())
                return from_box(sqcap_box(r, b, i))
            return from_box(d_box(i) if kind == "d" else dp_box(i))
        raise GeneratorNotInSource(kind)

    desc = {
        "s": "Σ_{i,j} s_{i,j}",
        "c, d, c', d'": "Σ_i of the colored cup or cap",
        "β_f": "Σ_i β_(f_i, i)",
        "t, t'": "Σ_{i,j} of the colored crossing",
        "decorated cups and caps (r, f)": "Σ_i (r, f_i)",
    }
    return FunctorSpec(name, source, target, image, wire, desc)


# -- definitions of c' and d' inside Heis ------------------------------------


def left_cup_definition(P: PresentationSpec) -> MorphismExpr:
    """``c'`` written with the generators of the decorated-cup presentation."""
    F, k = P.algebra, P.k
    if k > 0:
        one = F.one
        acc = MorphismExpr.zero((), (U(), D()))
        for b, coef in one.support():
            acc = acc - from_box(sqcup_box(k - 1, b)).scale(coef)
        return acc
    return Stack(F, ()).c(0).x(1, -k).tp(0).e


def left_cap_definition(P: PresentationSpec) -> MorphismExpr:
    """``d'`` written with the generators of the decorated-cup presentation."""
    F, k = P.algebra, P.k
    if k >= 0:
        return Stack(F, (D(), U())).tp(0).x(0, k).d(0).e
    acc = MorphismExpr.zero((D(), U()), ())
    for b, coef in F.one.support():
        acc = acc + from_box(sqcap_box(-k - 1, b)).scale(coef)
    return acc


def _definitions(source: PresentationSpec, target: PresentationSpec, name: str) -> FunctorSpec:
    cp_img = left_cup_definition(target)
    dp_img = left_cap_definition(target)
    tp_img = (
        Stack(target.algebra, (D(), U())).expr_at(2, cp_img).s(1).expr_at(0, dp_img).e
    )

    def wire(l: Letter):
        return [(l, None)]

    def image(box: Box, dom) -> MorphismExpr:
        if box.kind == "cp":
            return cp_img
        if box.kind == "dp":
            return dp_img
        if box.kind == "tp":
            return tp_img
        return from_box(box)

    desc = {
        "c'": "-(k-1, 1) decorated cup if k > 0, else t'(1 ⊗ x^{-k})c",
        "d'": "d(x^k ⊗ 1)t' if k >= 0, else the (-k-1, 1) decorated cap",
        "t'": "(d' ⊗ 1 ⊗ 1)(1 ⊗ s ⊗ 1)(1 ⊗ 1 ⊗ c') with the above",
        "other generators": "themselves",
    }
    return FunctorSpec(name, source, target, image, wire, desc)


FUNCTOR_NAMES = ("F", "G", "A", "B", "Def")


def build_functor(name: str, F: FrobeniusAlgebra, k: int) -> FunctorSpec:
    """``F: Heis' → Heis``, ``G: Heis → Heis'``, ``A: Heis'' → HeisAlt``,
    ``B: HeisAlt → Heis''`` and ``Def: HeisAlt → Heis``."""
    if name == "F":
        return _forget_colors(build_presentation(HEIS_PRIME, F, k), build_presentation(HEIS, F, k), "F")
    if name == "G":
        return _sum_colors(build_presentation(HEIS, F, k), build_presentation(HEIS_PRIME, F, k), "G")
    if name == "A":
        return _forget_colors(build_presentation(HEIS_DOUBLE_PRIME, F, k), build_presentation(HEIS_ALT, F, k), "A")
    if name == "B":
        return _sum_colors(build_presentation(HEIS_ALT, F, k), build_presentation(HEIS_DOUBLE_PRIME, F, k), "B")
    if name == "Def":
        return _definitions(build_presentation(HEIS_ALT, F, k), build_presentation(HEIS, F, k), "Def")
    raise KeyError(f"unknown functor {name!r}; expected one of {FUNCTOR_NAMES}")


def verify_functor(phi: FunctorSpec, budget: int = 20000) -> Report:
    """Zero-check the image of every source relation under the target rules."""
    rep = Report(f"functor {phi.name}: {phi.source.ident} -> {phi.target.ident} over {phi.source.algebra.name}, k={phi.source.k}")
    for rel in phi.source.relations:
        img = apply_functor(phi, rel.lhs) - apply_functor(phi, rel.rhs)
        verdict, steps = zero_check(img, phi.target.rules, budget)
        rep.results.append(RelationResult(rel.name, verdict, steps))
    return rep


def roundtrip_report(phi: FunctorSpec, psi: FunctorSpec, budget: int = 20000) -> Report:
    if phi.target.ident != psi.source.ident:
        raise ValueError(f"{phi.name} lands in {phi.target.ident} but {psi.name} starts at {psi.source.ident}")
    src = phi.source
    rep = Report(f"roundtrip {psi.name}∘{phi.name} on {src.ident}")
    for n, g in enumerate(src.generator_instances()):
        back = apply_functor(psi, apply_functor(phi, g))
        verdict, steps = zero_check(back - g, src.rules, budget)
        label = ", ".join(repr(t) for t in g.terms)
        rep.results.append(RelationResult(f"generator {label}", verdict, steps))
    return rep


def roundtrip_check(phi: FunctorSpec, psi: FunctorSpec, budget: int = 20000) -> bool:
    """``ψ∘φ`` is the identity on every generator of the source of ``φ``."""
    return roundtrip_report(phi, psi, budget).passed


# ---------------------------------------------------------------------------
# scripted proofs


@dataclass(frozen=True)
class Script:
    """A rewrite proof replayed as phases of named rules, then a final normalize."""

    name: str
    statement: str
    phases: tuple[tuple[str, ...], ...]
    instances: Callable[[], list[Relation]] = field(compare=False, default=lambda: [])

    def to_text(self) -> str:
        lines = [f"script {self.name}", f"  proves: {self.statement}"]
        for n, ph in enumerate(self.phases, 1):
            lines.append(f"  phase {n}: {', '.join(ph)}")
        lines.append("  then: full normalization")
        return "\n".join(lines)


def run_script(script: Script, rs: RuleSet, budget: int = 20000) -> Report:
    rep = Report(f"script {script.name}")
    for rel in script.instances():
        m = rel.difference
        steps = 0
        verdict = None
        try:
            for ph in script.phases:
                res = normalize_full(m, rs.subset(ph), budget, fill=False)
                m, steps = res.expr, steps + res.steps
            res = normalize_full(m, rs, budget)
            steps += res.steps
            verdict = Verdict.ZERO if res.expr.is_zero() else Verdict.NONZERO
        except BudgetExhausted as exc:
            verdict, steps = Verdict.UNKNOWN, steps + exc.steps
        rep.results.append(RelationResult(rel.name, verdict, steps))
    return rep


def colored_decorated_relations(P: PresentationSpec) -> list[Relation]:
    """Idempotent tokens on a decorated cup or cap act by ``δ_{i,j} δ_{i,l}``."""
    F, k = P.algebra, P.k
    out = []
    if not F.partitioned or k == 0:
        return out
    colors = range(1, F.n_colors + 1)
    for r in range(abs(k)):
        for b in range(F.dim):
            i = F.color_of(b)
            for j in colors:
                for l in colors:
                    keep = int(i == j and i == l)
                    if k > 0:
                        base = Stack(F, ()).sqcup(0, r, b)
                        rhs = Stack(F, ()).sqcup(0, r, b).e.scale(keep)
                        lhs = base.tok(0, F.idempotent(j)).tok(1, F.idempotent(l)).e
                    else:
                        dom = (D(), U())
                        lhs = Stack(F, dom).tok(0, F.idempotent(j)).tok(1, F.idempotent(l)).sqcap(0, r, b).e
                        rhs = Stack(F, dom).sqcap(0, r, b).e.scale(keep)
                    out.append(Relation(f"colored-decorated-{'cup' if k > 0 else 'cap'}[{r},{b};{j},{l}]", lhs, rhs, "lemma"))
    return out


def lemma_scripts(P: PresentationSpec) -> list[Script]:
    if P.k == 0 or not P.algebra.partitioned:
        return []
    if P.k > 0:
        phases = (
            ("decorated-cup",),
            ("token-through-c'", "token-merge-up", "token-merge-down", "dot-token-up", "dot-token-down"),
            ("close-loop", "bubble-to-right"),
        )
        statement = "(β_{e_j} ⊗ β⁻_{e_l}) ∘ (r,b)-cup = δ_{i,j} δ_{i,l} (r,b)-cup for b in B_i, k > 0"
    else:
        phases = (
            ("decorated-cap",),
            ("token-through-d'", "token-merge-up", "token-merge-down", "dot-token-up", "dot-token-down"),
            ("close-loop", "bubble-to-right"),
        )
        statement = "(r,b)-cap ∘ (β⁻_{e_j} ⊗ β_{e_l}) = δ_{i,j} δ_{i,l} (r,b)-cap for b in B_i, k < 0"
    return [Script("colored-decorated-cups-caps", statement, phases, lambda: colored_decorated_relations(P))]
