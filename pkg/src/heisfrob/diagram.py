"""String diagrams as stacks of boxes and their formal linear combinations.

A :class:`DiagramTerm` stores one nontrivial box per slice.  Each box sits at
an offset inside the word it acts on.  Terms are kept in a canonical
interchange order: the lowest box is the one that can be commuted to the
bottom with the smallest offset, and so on upwards.  Stackings that only
differ by the interchange law therefore compare equal.

Letters carry an orientation (``+1`` for ``Q₊`` and ``-1`` for ``Q₋``) and an
optional color.  A decoration on a downward strand is the mate of the upward
decoration: ``x`` on a ``Q₋`` letter is the dot rotated through the right
cup and cap, and likewise for tokens.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

from .bubbles import BubbleSymbol
from .frobenius import AlgebraElement, FrobeniusAlgebra, as_fraction


class BoundaryMismatch(ValueError):
    """Raised when two morphisms cannot be composed."""

    def __init__(self, top, bottom, detail: str = ""):
        self.top = top
        self.bottom = bottom
        msg = f"domain {format_word(top)} does not match codomain {format_word(bottom)}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class Letter(NamedTuple):
    sign: int
    color: int | None = None

    def __str__(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return s if self.color is None else f"{s}@{self.color}"

    def uncolored(self) -> "Letter":
        return Letter(self.sign)


UP = Letter(1)
DOWN = Letter(-1)

ObjectWord = tuple[Letter, ...]


def up(color: int | None = None) -> Letter:
    return Letter(1, color)


def down(color: int | None = None) -> Letter:
    return Letter(-1, color)


def word(spec: str | Iterable[Letter]) -> ObjectWord:
    """Build a word from a ``"+-"`` string or an iterable of letters."""
    if isinstance(spec, str):
        out = []
        for ch in spec:
            if ch == "+":
                out.append(UP)
            elif ch == "-":
                out.append(DOWN)
            elif not ch.isspace():
                raise ValueError(f"bad word character {ch!r}")
        return tuple(out)
    return tuple(spec)


def format_word(w: Sequence[Letter]) -> str:
    if not w:
        return "𝟙"
    return "".join("Q₊" if l.sign > 0 else "Q₋" for l in w) + (
        "" if all(l.color is None for l in w) else "[" + ",".join(str(l.color) for l in w) + "]"
    )


def strip_colors(w: Sequence[Letter]) -> ObjectWord:
    return tuple(Letter(l.sign) for l in w)


# ---------------------------------------------------------------------------
# boxes

CROSSINGS = frozenset({"s", "t", "tp"})
CUPS = frozenset({"c", "cp", "sqcup"})
CAPS = frozenset({"d", "dp", "sqcap"})
DECORATIONS = frozenset({"x", "tok"})

KIND_NAMES = {
    "x": "dot",
    "tok": "token",
    "s": "upward crossing",
    "t": "rightward crossing",
    "tp": "leftward crossing",
    "c": "right cup",
    "d": "right cap",
    "cp": "left cup",
    "dp": "left cap",
    "sqcup": "decorated left cup",
    "sqcap": "decorated left cap",
    "bub": "bubble",
}


class Box:
    """A generating morphism placed in a diagram.

    ``params`` holds the dot exponent for ``x``, the basis index for ``tok``,
    ``(r, b)`` for the decorated cups and caps, and the symbol for ``bub``.
    """

    __slots__ = ("kind", "dom", "cod", "params", "_hash")

    def __init__(self, kind: str, dom: ObjectWord, cod: ObjectWord, params: tuple = ()):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dom", tuple(dom))
        object.__setattr__(self, "cod", tuple(cod))
        object.__setattr__(self, "params", tuple(params))
        object.__setattr__(self, "_hash", hash((kind, self.dom, self.cod, self.params)))

    def __setattr__(self, name, value):
        raise AttributeError("Box is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Box)
            and self._hash == other._hash
            and self.kind == other.kind
            and self.dom == other.dom
            and self.cod == other.cod
            and self.params == other.params
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Box") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.kind, self.dom, self.cod, repr(self.params))

    def __repr__(self) -> str:
        p = f"{self.params}" if self.params else ""
        return f"Box({self.kind}{p}: {format_word(self.dom)}→{format_word(self.cod)})"

    @property
    def color(self) -> int | None:
        for l in self.dom + self.cod:
            if l.color is not None:
                return l.color
        return None

    def recolor(self, dom: ObjectWord, cod: ObjectWord) -> "Box":
        return Box(self.kind, dom, cod, self.params)


def dot_box(letter: Letter = UP, n: int = 1) -> Box:
    if n < 1:
        raise ValueError("dot exponent must be positive")
    return Box("x", (letter,), (letter,), (n,))


def token_box(letter: Letter, b: int) -> Box:
    return Box("tok", (letter,), (letter,), (b,))


def s_box(i: int | None = None, j: int | None = None) -> Box:
    return Box("s", (up(i), up(j)), (up(j), up(i)))


def t_box(i: int | None = None, j: int | None = None) -> Box:
    return Box("t", (up(i), down(j)), (down(j), up(i)))


def tp_box(i: int | None = None, j: int | None = None) -> Box:
    return Box("tp", (down(i), up(j)), (up(j), down(i)))


def c_box(i: int | None = None) -> Box:
    return Box("c", (), (down(i), up(i)))


def d_box(i: int | None = None) -> Box:
    return Box("d", (up(i), down(i)), ())


def cp_box(i: int | None = None) -> Box:
    return Box("cp", (), (up(i), down(i)))


def dp_box(i: int | None = None) -> Box:
    return Box("dp", (down(i), up(i)), ())


def sqcup_box(r: int, b: int, i: int | None = None) -> Box:
    return Box("sqcup", (), (up(i), down(i)), (r, b))


def sqcap_box(r: int, b: int, i: int | None = None) -> Box:
    return Box("sqcap", (down(i), up(i)), (), (r, b))


def bubble_box(sym: BubbleSymbol) -> Box:
    return Box("bub", (), (), (sym,))


# strand routing through a box: input port -> output port for through-strands;
# cups pair their two outputs and caps pair their two inputs
def through_port(box: Box, p: int) -> int | None:
    k = box.kind
    if k in DECORATIONS:
        return 0
    if k in CROSSINGS:
        return 1 - p
    return None


def through_port_back(box: Box, q: int) -> int | None:
    k = box.kind
    if k in DECORATIONS:
        return 0
    if k in CROSSINGS:
        return 1 - q
    return None


# ---------------------------------------------------------------------------
# interchange canonical form


def commute(lower: tuple[int, Box], upper: tuple[int, Box]):
    """Exchange two adjacent boxes when they are independent.

    Returns the new (lower, upper) pair or ``None`` if they are connected or
    one sits between the other's wires.
    """
    qa, A = lower
    pb, B = upper
    if pb + len(B.dom) <= qa:
        return (pb, B), (qa - len(B.dom) + len(B.cod), A)
    if qa + len(A.cod) <= pb:
        return (pb - len(A.cod) + len(A.dom), B), (qa, A)
    return None


def _bottom_candidates(rem: list[tuple[int, Box]]):
    """Boxes that commute down to the bottom: ``(key, bottom box, rest)``."""
    out = []
    for j in range(len(rem)):
        cur = rem[j]
        passed = []
        for i in range(j - 1, -1, -1):
            sw = commute(rem[i], cur)
            if sw is None:
                break
            cur, lifted = sw
            passed.append(lifted)
        else:
            # boxes without inputs go last: next to a cap they could sit on
            # either side, so their offset is only fixed once nothing else moves
            key = (not cur[1].dom, cur[0], cur[1].sort_key())
            out.append((key, cur, passed[::-1] + rem[j + 1 :]))
    return out


def _seq_key(seq) -> tuple:
    return tuple((o, b.sort_key()) for o, b in seq)


def _greedy_order(boxes: Sequence[tuple[int, Box]]) -> tuple[tuple[int, Box], ...]:
    rem = list(boxes)
    out: list[tuple[int, Box]] = []
    while rem:
        cands = _bottom_candidates(rem)
        low = min(c[0] for c in cands)
        tied = [c for c in cands if c[0] == low]
        if len(tied) == 1:
            _, cur, rem = tied[0]
            out.append(cur)
            continue
        best = min((([cur] + list(_greedy_order(rest))) for _, cur, rest in tied), key=_seq_key)
        return tuple(out + best)
    return tuple(out)


def canonical_order(boxes: Sequence[tuple[int, Box]]) -> tuple[tuple[int, Box], ...]:
    """Leftmost-first order: repeatedly take the box that can be commuted to
    the bottom with the smallest offset, ties broken by box order, and boxes
    without inputs only when nothing else can move.  When two equal boxes
    tie, both continuations are tried and the smaller kept.

    A closed component beside a cup can land on either side of it, so one
    pass may not be stable; passes repeat until a fixed point, or the
    smallest member of the cycle reached."""
    seen: list[tuple[tuple[int, Box], ...]] = []
    cur = _greedy_order(boxes)
    while cur not in seen:
        seen.append(cur)
        cur = _greedy_order(cur)
    cycle = seen[seen.index(cur) :]
    return min(cycle, key=_seq_key)


def _apply_boxes(dom: ObjectWord, boxes: Sequence[tuple[int, Box]]) -> ObjectWord:
    w = list(dom)
    for off, box in boxes:
        m = len(box.dom)
        if off < 0 or off + m > len(w) or tuple(w[off : off + m]) != box.dom:
            raise BoundaryMismatch(box.dom, tuple(w[off : off + m]), f"box {box!r} at offset {off}")
        w[off : off + m] = box.cod
    return tuple(w)


# ---------------------------------------------------------------------------
# terms


class Slice(NamedTuple):
    left: ObjectWord
    box: Box
    right: ObjectWord

    @property
    def dom(self) -> ObjectWord:
        return self.left + self.box.dom + self.right

    @property
    def cod(self) -> ObjectWord:
        return self.left + self.box.cod + self.right


def _bubble_key(b: BubbleSymbol):
    return b.sort_key()


class DiagramTerm:
    """A single planar diagram: boxes listed bottom to top, plus a monomial of
    closed bubbles that live in the region to the right of every strand."""

    __slots__ = ("dom", "cod", "boxes", "bubbles", "_hash")

    def __init__(
        self,
        dom: ObjectWord,
        boxes: Sequence[tuple[int, Box]] = (),
        bubbles: Sequence[BubbleSymbol] = (),
        *,
        canonical: bool = False,
        cod: ObjectWord | None = None,
    ):
        dom = tuple(dom)
        boxes = tuple(boxes) if canonical else canonical_order(boxes)
        if cod is None:
            cod = _apply_boxes(dom, boxes)
        bubbles = tuple(sorted(bubbles, key=_bubble_key))
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", tuple(cod))
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "bubbles", bubbles)
        object.__setattr__(self, "_hash", hash((dom, boxes, bubbles)))

    def __setattr__(self, name, value):
        raise AttributeError("DiagramTerm is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiagramTerm)
            and self._hash == other._hash
            and self.dom == other.dom
            and self.boxes == other.boxes
            and self.bubbles == other.bubbles
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = [f"{b.kind}{list(b.params) if b.params else ''}@{o}" for o, b in self.boxes]
        bub = f" · {list(self.bubbles)}" if self.bubbles else ""
        return f"DiagramTerm({format_word(self.dom)}: {' ; '.join(parts) or 'id'}{bub})"

    def sort_key(self):
        return (
            len(self.boxes),
            tuple((o, b.sort_key()) for o, b in self.boxes),
            tuple(b.sort_key() for b in self.bubbles),
            self.dom,
        )

    @property
    def slices(self) -> list[Slice]:
        out = []
        w = self.dom
        for off, box in self.boxes:
            m = len(box.dom)
            out.append(Slice(w[:off], box, w[off + m :]))
            w = w[:off] + box.cod + w[off + m :]
        return out

    def words(self) -> list[ObjectWord]:
        """The intermediate words: ``words()[i]`` is the input of box ``i``."""
        out = [self.dom]
        w = self.dom
        for off, box in self.boxes:
            w = w[:off] + box.cod + w[off + len(box.dom) :]
            out.append(w)
        return out

    def with_bubbles(self, extra: Sequence[BubbleSymbol]) -> "DiagramTerm":
        if not extra:
            return self
        return DiagramTerm(self.dom, self.boxes, self.bubbles + tuple(extra), canonical=True, cod=self.cod)

    def count(self, kinds) -> int:
        return sum(1 for _, b in self.boxes if b.kind in kinds)


def identity_term(w: ObjectWord) -> DiagramTerm:
    return DiagramTerm(tuple(w), (), (), canonical=True, cod=tuple(w))


def _unify_words(top: ObjectWord, bottom: ObjectWord) -> bool:
    """Check composability.  Returns ``False`` when the colors force zero."""
    if len(top) != len(bottom) or any(a.sign != b.sign for a, b in zip(top, bottom)):
        raise BoundaryMismatch(top, bottom)
    zero = False
    for a, b in zip(top, bottom):
        if a.color == b.color:
            continue
        if a.color is None or b.color is None:
            raise BoundaryMismatch(top, bottom, "colored and uncolored letters meet")
        zero = True
    return not zero


def compose_terms(top: DiagramTerm, bottom: DiagramTerm) -> DiagramTerm | None:
    if not _unify_words(top.dom, bottom.cod):
        return None
    return DiagramTerm(bottom.dom, bottom.boxes + top.boxes, bottom.bubbles + top.bubbles, cod=top.cod)


def tensor_terms(left: DiagramTerm, right: DiagramTerm) -> DiagramTerm:
    shift = len(left.cod)
    boxes = left.boxes + tuple((o + shift, b) for o, b in right.boxes)
    return DiagramTerm(
        left.dom + right.dom, boxes, left.bubbles + right.bubbles, cod=left.cod + right.cod
    )


# ---------------------------------------------------------------------------
# linear combinations


def _common_word(words: Iterable[ObjectWord], fallback: ObjectWord) -> ObjectWord:
    ws = list(words)
    if not ws:
        return fallback
    first = ws[0]
    if all(w == first for w in ws):
        return first
    return strip_colors(first)


class MorphismExpr:
    """A finite formal combination of diagram terms with exact coefficients."""

    __slots__ = ("dom", "cod", "terms")

    def __init__(self, terms: dict[DiagramTerm, Fraction] | Iterable, dom=None, cod=None):
        if not isinstance(terms, dict):
            acc: dict[DiagramTerm, Fraction] = {}
            for t, c in terms:
                acc[t] = acc.get(t, Fraction(0)) + as_fraction(c)
            terms = acc
        clean = {t: Fraction(c) for t, c in terms.items() if c != 0}
        if dom is None or cod is None:
            if not clean:
                raise ValueError("zero morphism needs an explicit boundary")
        sign_dom = None
        for t in clean:
            sd, sc = strip_colors(t.dom), strip_colors(t.cod)
            if sign_dom is None:
                sign_dom, sign_cod = sd, sc
            elif (sd, sc) != (sign_dom, sign_cod):
                raise BoundaryMismatch(sd, sign_dom, "terms of a sum must share boundaries")
        d = _common_word((t.dom for t in clean), tuple(dom) if dom is not None else ())
        c = _common_word((t.cod for t in clean), tuple(cod) if cod is not None else ())
        if dom is not None and clean and strip_colors(dom) != strip_colors(d):
            raise BoundaryMismatch(tuple(dom), d, "declared domain differs from terms")
        if cod is not None and clean and strip_colors(cod) != strip_colors(c):
            raise BoundaryMismatch(tuple(cod), c, "declared codomain differs from terms")
        object.__setattr__(self, "dom", d if clean else tuple(dom))
        object.__setattr__(self, "cod", c if clean else tuple(cod))
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MorphismExpr is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, dom: ObjectWord, cod: ObjectWord) -> "MorphismExpr":
        return cls({}, dom, cod)

    @classmethod
    def of(cls, term: DiagramTerm, coef=1) -> "MorphismExpr":
        return cls({term: as_fraction(coef)}, term.dom, term.cod)

    # -- vector space ------------------------------------------------------
    def _check_same(self, other: "MorphismExpr") -> None:
        if strip_colors(self.dom) != strip_colors(other.dom):
            raise BoundaryMismatch(self.dom, other.dom, "sum of morphisms with different domains")
        if strip_colors(self.cod) != strip_colors(other.cod):
            raise BoundaryMismatch(self.cod, other.cod, "sum of morphisms with different codomains")

    def __add__(self, other: "MorphismExpr") -> "MorphismExpr":
        self._check_same(other)
        acc = dict(self.terms)
        for t, c in other.terms.items():
            acc[t] = acc.get(t, Fraction(0)) + c
        return MorphismExpr(acc, self.dom, self.cod)

    def __sub__(self, other: "MorphismExpr") -> "MorphismExpr":
        return self + (-other)

    def __neg__(self) -> "MorphismExpr":
        return MorphismExpr({t: -c for t, c in self.terms.items()}, self.dom, self.cod)

    def scale(self, s) -> "MorphismExpr":
        s = as_fraction(s)
        return MorphismExpr({t: s * c for t, c in self.terms.items()}, self.dom, self.cod)

    def __rmul__(self, s) -> "MorphismExpr":
        return self.scale(s)

    def __mul__(self, other):
        """``a * b`` is composition (``a`` on top), ``a * 3`` is scaling."""
        if isinstance(other, MorphismExpr):
            return compose(self, other)
        return self.scale(other)

    def __matmul__(self, other: "MorphismExpr") -> "MorphismExpr":
        return tensor(self, other)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MorphismExpr)
            and self.terms == other.terms
            and strip_colors(self.dom) == strip_colors(other.dom)
            and strip_colors(self.cod) == strip_colors(other.cod)
        )

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[DiagramTerm, Fraction]]:
        return iter(self.sorted_items())

    def sorted_items(self) -> list[tuple[DiagramTerm, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __repr__(self) -> str:
        if not self.terms:
            return f"0: {format_word(self.dom)}→{format_word(self.cod)}"
        return " + ".join(f"{c}·{t!r}" for t, c in self.sorted_items())


def compose(top: MorphismExpr, bottom: MorphismExpr) -> MorphismExpr:
    """Vertical composition ``top ∘ bottom``."""
    if strip_colors(top.dom) != strip_colors(bottom.cod):
        raise BoundaryMismatch(top.dom, bottom.cod)
    acc: dict[DiagramTerm, Fraction] = {}
    for tt, tc in top.terms.items():
        for bt, bc in bottom.terms.items():
            t = compose_terms(tt, bt)
            if t is None:
                continue
            acc[t] = acc.get(t, Fraction(0)) + tc * bc
    return MorphismExpr(acc, bottom.dom, top.cod)


def tensor(left: MorphismExpr, right: MorphismExpr) -> MorphismExpr:
    """Horizontal juxtaposition ``left ⊗ right``."""
    acc: dict[DiagramTerm, Fraction] = {}
    for lt, lc in left.terms.items():
        for rt, rc in right.terms.items():
            t = tensor_terms(lt, rt)
            acc[t] = acc.get(t, Fraction(0)) + lc * rc
    return MorphismExpr(acc, left.dom + right.dom, left.cod + right.cod)


def boundary(m: MorphismExpr) -> tuple[ObjectWord, ObjectWord]:
    return m.dom, m.cod


def compose_all(*ms: MorphismExpr) -> MorphismExpr:
    """``compose_all(a, b, c) = a ∘ b ∘ c``."""
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = compose(m, out)
    return out


def tensor_all(*ms: MorphismExpr) -> MorphismExpr:
    out = ms[0]
    for m in ms[1:]:
        out = tensor(out, m)
    return out


def sum_exprs(exprs: Iterable[MorphismExpr], dom: ObjectWord, cod: ObjectWord) -> MorphismExpr:
    acc: dict[DiagramTerm, Fraction] = {}
    for e in exprs:
        for t, c in e.terms.items():
            acc[t] = acc.get(t, Fraction(0)) + c
    return MorphismExpr(acc, dom, cod)


# ---------------------------------------------------------------------------
# generator helpers


def identity(w: ObjectWord | str) -> MorphismExpr:
    w = word(w)
    return MorphismExpr.of(identity_term(w))


def from_box(box: Box) -> MorphismExpr:
    return MorphismExpr.of(DiagramTerm(box.dom, ((0, box),), canonical=True, cod=box.cod))


def boxes_expr(dom: ObjectWord, boxes: Sequence[tuple[int, Box]], coef=1) -> MorphismExpr:
    return MorphismExpr.of(DiagramTerm(tuple(dom), boxes), coef)


def element_coords(F: FrobeniusAlgebra, f) -> list[tuple[int, Fraction]]:
    """Support of ``f`` given as an element, basis index, or token name."""
    if isinstance(f, AlgebraElement):
        return f.support()
    if isinstance(f, int):
        return [(f, Fraction(1))]
    return F.named(f).support()


def token(F: FrobeniusAlgebra, f, letter: Letter = UP) -> MorphismExpr:
    """``β_f`` on one strand, expanded over the basis."""
    terms = {}
    for b, coef in element_coords(F, f):
        if letter.color is not None and F.color_of(b) != letter.color:
            continue
        t = DiagramTerm((letter,), ((0, token_box(letter, b)),), canonical=True, cod=(letter,))
        terms[t] = coef
    return MorphismExpr(terms, (letter,), (letter,))


def sq_cup(F: FrobeniusAlgebra, r: int, f, color: int | None = None) -> MorphismExpr:
    cod = (up(color), down(color))
    terms = {}
    for b, coef in element_coords(F, f):
        if color is not None and F.color_of(b) != color:
            continue
        terms[DiagramTerm((), ((0, sqcup_box(r, b, color)),), canonical=True, cod=cod)] = coef
    return MorphismExpr(terms, (), cod)


def sq_cap(F: FrobeniusAlgebra, r: int, f, color: int | None = None) -> MorphismExpr:
    dom = (down(color), up(color))
    terms = {}
    for b, coef in element_coords(F, f):
        if color is not None and F.color_of(b) != color:
            continue
        terms[DiagramTerm(dom, ((0, sqcap_box(r, b, color)),), canonical=True, cod=())] = coef
    return MorphismExpr(terms, dom, ())


def dots(n: int, letter: Letter = UP) -> MorphismExpr:
    if n == 0:
        return identity((letter,))
    return from_box(dot_box(letter, n))


# ---------------------------------------------------------------------------
# random diagrams for property tests


def random_diagram(
    F: FrobeniusAlgebra,
    rng,
    *,
    generators: Iterable[str],
    k: int,
    dom: Sequence[Letter] = (),
    n_boxes: int = 4,
    colored: bool = False,
    max_width: int = 6,
) -> DiagramTerm:
    """Stack ``n_boxes`` random generators on ``dom``.

    ``rng`` is a :class:`random.Random`; ``generators`` are box kinds.  With
    ``colored`` the letters of ``dom`` must carry colors and new cups draw a
    random color.
    """
    gens = set(generators)
    colors = list(range(1, F.n_colors + 1)) if colored else [None]

    def basis(c):
        return F.component_basis(c)

    w = tuple(dom)
    boxes: list[tuple[int, Box]] = []
    for _ in range(n_boxes):
        cands: dict[str, list[tuple[int, Box]]] = {}

        def add(kind, off, box):
            if kind in gens:
                cands.setdefault(kind, []).append((off, box))

        for p, l in enumerate(w):
            add("x", p, dot_box(l, 1))
            for b in basis(l.color):
                add("tok", p, token_box(l, b))
        for p in range(len(w) - 1):
            l1, l2 = w[p], w[p + 1]
            same = l1.color == l2.color
            if l1.sign > 0 and l2.sign > 0:
                add("s", p, s_box(l1.color, l2.color))
            elif l1.sign > 0 and l2.sign < 0:
                add("t", p, t_box(l1.color, l2.color))
                if same:
                    add("d", p, d_box(l1.color))
            elif l1.sign < 0 and l2.sign > 0:
                add("tp", p, tp_box(l1.color, l2.color))
                if same:
                    add("dp", p, dp_box(l1.color))
                    for r in range(max(-k, 0)):
                        for b in basis(l1.color):
                            add("sqcap", p, sqcap_box(r, b, l1.color))
        if len(w) + 2 <= max_width:
            for p in range(len(w) + 1):
                for c in colors:
                    add("c", p, c_box(c))
                    add("cp", p, cp_box(c))
                    for r in range(max(k, 0)):
                        for b in basis(c):
                            add("sqcup", p, sqcup_box(r, b, c))
        if not cands:
            break
        kind = rng.choice(sorted(cands))
        off, box = rng.choice(cands[kind])
        boxes.append((off, box))
        w = w[:off] + box.cod + w[off + len(box.dom) :]
    return DiagramTerm(tuple(dom), boxes)
