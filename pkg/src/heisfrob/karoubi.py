"""Color blocks inside the partial Karoubi envelope.

For a partitioned algebra ``F = F_1 ⊕ … ⊕ F_n`` an object of the envelope is
a word of ``Q±`` letters, each carrying one idempotent token ``e_i``.
Morphisms are diagrams ``g`` of the uncolored category over ``F`` with
``g ∘ e_src = g = e_dst ∘ g``.

Sorting the letters by color is an isomorphism built from crossings.  Between
sorted objects a morphism whose normal form has no cross-color crossing
factors into one block per color, each a diagram over ``F_i``.  Those blocks
form a :class:`TensorCatMorphism`, and :meth:`PartialKaroubi.inclusion`
juxtaposes them back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bubbles import BubbleSymbol
from .diagram import (
    DOWN,
    UP,
    Box,
    BoundaryMismatch,
    DiagramTerm,
    Letter,
    MorphismExpr,
    ObjectWord,
    c_box,
    compose,
    compose_all,
    compose_terms,
    d_box,
    format_word,
    from_box,
    identity,
    s_box,
    t_box,
    tensor,
    tensor_all,
    token,
    tp_box,
)
from .frobenius import AlgebraElement, FrobeniusAlgebra, as_fraction, component_algebra
from .presentations import HEIS, PresentationSpec, build_presentation
from .rewrite import BudgetExhausted, Verdict, equal_zero, fill_tokens, normalize_full, strands


class ComponentBoundaryMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# objects


@dataclass(frozen=True)
class PKObject:
    """A word of ``Q±`` letters with one idempotent color per letter."""

    letters: ObjectWord
    colors: tuple[int, ...]

    def __post_init__(self):
        letters = tuple(Letter(l.sign) for l in self.letters)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(letters) != len(self.colors):
            raise ValueError("one color per letter")

    @classmethod
    def parse(cls, text: str) -> "PKObject":
        """``"+2 -1"`` is ``(Q₊, e₂) ⊗ (Q₋, e₁)``; the empty string is ``𝟙``."""
        letters, colors = [], []
        for tok in text.split():
            sign = {"+": 1, "-": -1}.get(tok[0])
            if sign is None or not tok[1:].isdigit():
                raise ValueError(f"bad letter {tok!r}; expected +i or -i")
            letters.append(Letter(sign))
            colors.append(int(tok[1:]))
        return cls(tuple(letters), tuple(colors))

    def __str__(self) -> str:
        if not self.letters:
            return "𝟙"
        return " ".join(f"{'+' if l.sign > 0 else '-'}{c}" for l, c in zip(self.letters, self.colors))

    def __len__(self) -> int:
        return len(self.letters)

    def is_sorted(self) -> bool:
        return list(self.colors) == sorted(self.colors)

    def block(self, color: int) -> ObjectWord:
        return tuple(l for l, c in zip(self.letters, self.colors) if c == color)

    def idempotent(self, F: FrobeniusAlgebra) -> MorphismExpr:
        """``e_{γ_1} ⊗ … ⊗ e_{γ_m}``; ``id_𝟙`` for the empty word."""
        parts = [token(F, F.idempotent(c), l) for l, c in zip(self.letters, self.colors)]
        return tensor_all(*parts) if parts else identity(())


# ---------------------------------------------------------------------------
# the tensor product of the block categories

Key = tuple[DiagramTerm, ...]


@dataclass(frozen=True)
class TensorCatMorphism:
    """``Σ c · (m_1 ⊗ … ⊗ m_n)`` with ``m_i`` a diagram over ``F_i``."""

    doms: tuple[ObjectWord, ...]
    cods: tuple[ObjectWord, ...]
    terms: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, v in self.terms.items():
            v = as_fraction(v)
            if not v:
                continue
            if tuple(t.dom for t in key) != self.doms or tuple(t.cod for t in key) != self.cods:
                raise ComponentBoundaryMismatch("simple tensor with the wrong component boundaries")
            clean[key] = clean.get(key, Fraction(0)) + v
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    @classmethod
    def simple(cls, parts: Sequence[MorphismExpr], coef=1) -> "TensorCatMorphism":
        """Expand ``m_1 ⊗ … ⊗ m_n`` multilinearly."""
        doms = tuple(p.dom for p in parts)
        cods = tuple(p.cod for p in parts)
        acc: dict[Key, Fraction] = {}
        for combo in itertools.product(*(list(p) for p in parts)):
            c = as_fraction(coef)
            for _, v in combo:
                c *= v
            key = tuple(t for t, _ in combo)
            acc[key] = acc.get(key, Fraction(0)) + c
        return cls(doms, cods, acc)

    @classmethod
    def identity(cls, words: Sequence[ObjectWord]) -> "TensorCatMorphism":
        return cls.simple([identity(tuple(w)) for w in words])

    @property
    def n(self) -> int:
        return len(self.doms)

    def __add__(self, other: "TensorCatMorphism") -> "TensorCatMorphism":
        if (self.doms, self.cods) != (other.doms, other.cods):
            raise ComponentBoundaryMismatch("sum of tensors with different boundaries")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return TensorCatMorphism(self.doms, self.cods, acc)

    def scale(self, s) -> "TensorCatMorphism":
        s = as_fraction(s)
        return TensorCatMorphism(self.doms, self.cods, {k: s * v for k, v in self.terms.items()})

    def __neg__(self) -> "TensorCatMorphism":
        return self.scale(-1)

    def __sub__(self, other: "TensorCatMorphism") -> "TensorCatMorphism":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{c}·(" + " ⊗ ".join(map(repr, key)) + ")" for key, c in self.terms.items()]
        return " + ".join(parts)


def tensor_compose(f: TensorCatMorphism, g: TensorCatMorphism) -> TensorCatMorphism:
    """``f ∘ g`` computed in each component."""
    if f.n != g.n:
        raise ComponentBoundaryMismatch(f"{f.n} components vs {g.n}")
    for i, (a, b) in enumerate(zip(f.doms, g.cods), start=1):
        if a != b:
            raise ComponentBoundaryMismatch(
                f"component {i}: {format_word(b)} does not match {format_word(a)}"
            )
    acc: dict[Key, Fraction] = {}
    for kf, cf in f.terms.items():
        for kg, cg in g.terms.items():
            parts = [compose_terms(a, b) for a, b in zip(kf, kg)]
            if any(p is None for p in parts):
                continue
            key = tuple(parts)
            acc[key] = acc.get(key, Fraction(0)) + cf * cg
    return TensorCatMorphism(g.doms, f.cods, acc)


# ---------------------------------------------------------------------------
# the envelope


@dataclass
class SplitUnknown:
    """The normal form does not factor into color blocks."""

    reason: str
    term: DiagramTerm | None = None
    verdict: str = Verdict.UNKNOWN

    def __bool__(self) -> bool:
        return False


def _down_crossing() -> MorphismExpr:
    """The crossing of two downward strands, drawn as the mate of ``s``."""
    D2 = (DOWN, DOWN)
    cup_in = compose(tensor(identity((DOWN,)), tensor(from_box(c_box()), identity((UP,)))), from_box(c_box()))
    start = tensor(cup_in, identity(D2))  # D D U U D D
    mid = tensor_all(identity(D2), from_box(s_box()), identity(D2))
    cap_in = tensor_all(identity(D2), identity((UP,)), from_box(d_box()), identity((DOWN,)))
    cap_out = tensor(identity(D2), from_box(d_box()))
    return compose_all(cap_out, cap_in, mid, start)


def _crossing(a: Letter, b: Letter) -> MorphismExpr:
    """The crossing ``a b → b a`` used to swap two letters of different color."""
    if a.sign > 0 and b.sign > 0:
        return from_box(s_box())
    if a.sign > 0 and b.sign < 0:
        return from_box(t_box())
    if a.sign < 0 and b.sign > 0:
        return from_box(tp_box())
    return _down_crossing()


class PartialKaroubi:
    """The partial Karoubi envelope over a partitioned algebra at central charge ``k``."""

    def __init__(self, F: FrobeniusAlgebra, k: int, *, budget: int = 20000):
        if not F.partitioned:
            raise ValueError(f"{F.name} carries no color partition")
        self.algebra = F
        self.k = k
        self.budget = budget
        self.presentation: PresentationSpec = build_presentation(HEIS, F, k)
        self.rules = self.presentation.rules
        self.colors = list(range(1, F.n_colors + 1))
        self.blocks = [component_algebra(F, c) for c in self.colors]
        self._block_rules: dict[int, object] = {}

    def block_rules(self, color: int):
        if color not in self._block_rules:
            self._block_rules[color] = build_presentation(HEIS, self.blocks[color - 1], self.k).rules
        return self._block_rules[color]

    # -- hom-sets -----------------------------------------------------------
    def hom_member(self, g: MorphismExpr, src: PKObject, dst: PKObject, budget: int | None = None) -> str:
        """``Zero`` when ``g ∘ e_src = g = e_dst ∘ g``, else the failing verdict."""
        if tuple(g.dom) != src.letters or tuple(g.cod) != dst.letters:
            raise BoundaryMismatch(g.cod, g.dom, f"expected {format_word(src.letters)} → {format_word(dst.letters)}")
        budget = budget or self.budget
        F = self.algebra
        v1 = equal_zero(compose(g, src.idempotent(F)) - g, self.rules, budget)
        v2 = equal_zero(compose(dst.idempotent(F), g) - g, self.rules, budget)
        if Verdict.NONZERO in (v1, v2):
            return Verdict.NONZERO
        if Verdict.UNKNOWN in (v1, v2):
            return Verdict.UNKNOWN
        return Verdict.ZERO

    # -- color sorting -------------------------------------------------------
    def _sort_layers(self, obj: PKObject) -> tuple[PKObject, list[tuple[MorphismExpr, MorphismExpr]]]:
        """Bubble sort by color; one ``(swap, inverse swap)`` pair per step."""
        letters, colors = list(obj.letters), list(obj.colors)
        layers = []
        changed = True
        while changed:
            changed = False
            for p in range(len(colors) - 1):
                if colors[p] > colors[p + 1]:
                    a, b = letters[p], letters[p + 1]
                    left, right = identity(tuple(letters[:p])), identity(tuple(letters[p + 2 :]))
                    # the inverse of a b → b a is the crossing b a → a b: s and
                    # the downward crossing square to one across colors, t and
                    # t′ invert each other
                    fwd = tensor_all(left, _crossing(a, b), right)
                    back = tensor_all(left, _crossing(b, a), right)
                    layers.append((fwd, back))
                    letters[p], letters[p + 1] = b, a
                    colors[p], colors[p + 1] = colors[p + 1], colors[p]
                    changed = True
        return PKObject(tuple(letters), tuple(colors)), layers

    def color_sort(self, obj: PKObject) -> tuple[PKObject, MorphismExpr, MorphismExpr]:
        """Stable sort by color.  Returns ``(sorted, iso, iso_inv)`` with
        ``iso: obj → sorted``."""
        F = self.algebra
        target, layers = self._sort_layers(obj)
        iso = obj.idempotent(F)
        for fwd, _ in layers:
            iso = compose(fwd, iso)
        iso_inv = target.idempotent(F)
        for _, back in reversed(layers):
            iso_inv = compose(back, iso_inv)
        return target, iso, iso_inv

    def check_sort(self, obj: PKObject, budget: int | None = None) -> tuple[str, str]:
        """Verdicts for ``iso_inv ∘ iso - e_obj`` and ``iso ∘ iso_inv - e_sorted``.

        The composites are normalized from the middle outwards, one layer
        pair at a time.  The rule set has no braid or separated double
        crossing moves for downward strands, so normalizing the whole
        composite at once can stall on words with several downward swaps.
        """
        budget = budget or self.budget
        F = self.algebra
        target, layers = self._sort_layers(obj)

        def staged(core: MorphismExpr, pairs, outer: MorphismExpr) -> str:
            m = core
            try:
                for fwd, back in pairs:
                    m = normalize_full(compose(back, compose(m, fwd)), self.rules, budget, fill=False).expr
            except BudgetExhausted:
                return Verdict.UNKNOWN
            return equal_zero(compose(m, outer) - outer, self.rules, budget)

        # iso_inv ∘ iso: the last swap meets its inverse first
        a = staged(target.idempotent(F), list(reversed(layers)), obj.idempotent(F))
        # iso ∘ iso_inv: the first swap meets its inverse first
        b = staged(obj.idempotent(F), [(back, fwd) for fwd, back in layers], target.idempotent(F))
        return a, b

    # -- blocks ------------------------------------------------------------------
    def _to_block(self, box: Box, color: int) -> Box | None:
        idx = self.algebra.component_basis(color)
        local = {g: j for j, g in enumerate(idx)}
        if box.kind == "tok":
            b = box.params[0]
            return Box("tok", box.dom, box.cod, (local[b],)) if b in local else None
        if box.kind in ("sqcup", "sqcap"):
            r, b = box.params
            return Box(box.kind, box.dom, box.cod, (r, local[b])) if b in local else None
        return box

    def _from_block(self, box: Box, color: int) -> Box:
        idx = self.algebra.component_basis(color)
        if box.kind == "tok":
            return Box("tok", box.dom, box.cod, (idx[box.params[0]],))
        if box.kind in ("sqcup", "sqcap"):
            r, b = box.params
            return Box(box.kind, box.dom, box.cod, (r, idx[b]))
        if box.kind == "bub":
            return Box("bub", (), (), (self._bubble_from_block(box.params[0], color),))
        return box

    def _bubble_to_block(self, sym: BubbleSymbol, color: int) -> BubbleSymbol | None:
        F = self.algebra
        idx = F.component_basis(color)
        coords = [sym.token.coords[g] for g in idx]
        if not any(coords):
            return None
        E = self.blocks[color - 1]
        return BubbleSymbol(sym.orientation, sym.dots, AlgebraElement(E, tuple(coords)), None, sym.k)

    def _bubble_from_block(self, sym: BubbleSymbol, color: int) -> BubbleSymbol:
        F = self.algebra
        coords = [Fraction(0)] * F.dim
        for j, g in enumerate(F.component_basis(color)):
            coords[g] = sym.token.coords[j]
        return BubbleSymbol(sym.orientation, sym.dots, AlgebraElement(F, tuple(coords)), None, sym.k)

    def inclusion(self, f: TensorCatMorphism) -> MorphismExpr:
        """``f_1 ⊗ … ⊗ f_n ↦ f_1 ⊗ … ⊗ f_n`` with block tokens read in ``F``.

        Each strand first gets an explicit token, so an undecorated strand of
        block ``i`` lands on the idempotent ``e_i`` rather than on ``1``.
        """
        if f.n != len(self.colors):
            raise ComponentBoundaryMismatch(f"expected {len(self.colors)} components, got {f.n}")
        dom = tuple(l for w in f.doms for l in w)
        cod = tuple(l for w in f.cods for l in w)
        acc = MorphismExpr.zero(dom, cod)
        for key, coef in f.terms.items():
            parts = []
            for color, term in zip(self.colors, key):
                E = self.blocks[color - 1]
                block: dict[DiagramTerm, Fraction] = {}
                for c2, filled in fill_tokens(term, E):
                    boxes = [(o, self._from_block(b, color)) for o, b in filled.boxes]
                    bubs = [self._bubble_from_block(s, color) for s in filled.bubbles]
                    t = DiagramTerm(filled.dom, boxes, bubs)
                    block[t] = block.get(t, Fraction(0)) + c2
                parts.append(MorphismExpr(block, term.dom, term.cod))
            acc = acc + tensor_all(*parts).scale(coef)
        return acc

    def split(self, g: MorphismExpr, src: PKObject, dst: PKObject, budget: int | None = None):
        """Factor ``e_dst ∘ g ∘ e_src`` into color blocks, or explain why not."""
        if not (src.is_sorted() and dst.is_sorted()):
            raise ValueError("split needs color-sorted objects")
        if tuple(g.dom) != src.letters or tuple(g.cod) != dst.letters:
            raise BoundaryMismatch(g.cod, g.dom, "boundary does not match the objects")
        F = self.algebra
        h = compose(dst.idempotent(F), compose(g, src.idempotent(F)))
        try:
            res = normalize_full(h, self.rules, budget or self.budget)
        except BudgetExhausted as e:
            return SplitUnknown(f"rewrite budget exhausted after {e.steps} steps")
        doms = tuple(src.block(c) for c in self.colors)
        cods = tuple(dst.block(c) for c in self.colors)
        acc: dict[Key, Fraction] = {}
        for term, coef in res.expr:
            pieces = self._factor(term, src, dst)
            if isinstance(pieces, SplitUnknown):
                return pieces
            for key, c2 in pieces:
                acc[key] = acc.get(key, Fraction(0)) + coef * c2
        try:
            return self.normalize_tensor(TensorCatMorphism(doms, cods, acc), budget)
        except BudgetExhausted as e:
            return SplitUnknown(f"block normalization ran out after {e.steps} steps")

    def normalize_tensor(self, f: TensorCatMorphism, budget: int | None = None) -> TensorCatMorphism:
        """Normalize every component in its own block category."""
        cache: dict[tuple[int, DiagramTerm], MorphismExpr] = {}
        acc = TensorCatMorphism(f.doms, f.cods, {})
        for key, coef in f.terms.items():
            parts = []
            for c, term in zip(self.colors, key):
                if (c, term) not in cache:
                    m = MorphismExpr.of(term)
                    cache[(c, term)] = normalize_full(m, self.block_rules(c), budget or self.budget).expr
                parts.append(cache[(c, term)])
            acc = acc + TensorCatMorphism.simple(parts, coef)
        return acc

    def _factor(self, term: DiagramTerm, src: PKObject, dst: PKObject):
        F = self.algebra
        sts = strands(term)
        box_colors: dict[int, set[int]] = {}
        for st in sts:
            cols = {F.color_of(term.boxes[j][1].params[0]) for j in st.visits if term.boxes[j][1].kind == "tok"}
            if len(cols) != 1:
                return SplitUnknown("a strand carries no single color", term)
            (c,) = cols
            for j in st.visits:
                box_colors.setdefault(j, set()).add(c)
        colors = list(src.colors)
        blocks: dict[int, list[tuple[int, Box]]] = {c: [] for c in self.colors}
        for j, (off, box) in enumerate(term.boxes):
            if box.kind == "bub":
                # an embedded bubble belongs to the block of its token
                sym = box.params[0]
                cs = {F.color_of(b) for b, _ in sym.token.support()}
                if len(cs) != 1:
                    return SplitUnknown("an embedded bubble mixes colors", term)
                (c,) = cs
                local_sym = self._bubble_to_block(sym, c)
                pos = sum(1 for x in colors[:off] if x == c)
                blocks[c].append((pos, Box("bub", (), (), (local_sym,))))
                continue
            cs = box_colors.get(j, set())
            if len(cs) != 1:
                return SplitUnknown(f"box {box.kind} at slice {j} joins strands of different colors", term)
            (c,) = cs
            if any(x != c for x in colors[off : off + len(box.dom)]):
                return SplitUnknown(f"box {box.kind} at slice {j} meets a strand of another color", term)
            local = self._to_block(box, c)
            if local is None:
                return SplitUnknown(f"box {box.kind} at slice {j} carries a label of another color", term)
            blocks[c].append((sum(1 for x in colors[:off] if x == c), local))
            colors = colors[:off] + [c] * len(box.cod) + colors[off + len(box.dom) :]
        if colors != list(dst.colors):
            return SplitUnknown("the colors at the top do not match the target", term)
        # bubbles: split each token by color, multilinearly
        options = []
        for sym in term.bubbles:
            opts = [(c, b) for c in self.colors if (b := self._bubble_to_block(sym, c)) is not None]
            options.append(opts)
        out = []
        for choice in itertools.product(*options):
            key = []
            for c in self.colors:
                bubs = [b for cc, b in choice if cc == c]
                key.append(DiagramTerm(src.block(c), blocks[c], bubs))
            out.append((tuple(key), Fraction(1)))
        return out


# ---------------------------------------------------------------------------
# module-level entry points


def pk_hom_member(pk: PartialKaroubi, g: MorphismExpr, src: PKObject, dst: PKObject, budget: int | None = None) -> str:
    return pk.hom_member(g, src, dst, budget)


def color_sort(pk: PartialKaroubi, obj: PKObject):
    return pk.color_sort(obj)


def split_morphism(pk: PartialKaroubi, g: MorphismExpr, src: PKObject, dst: PKObject, budget: int | None = None):
    return pk.split(g, src, dst, budget)


def inclusion(pk: PartialKaroubi, f: TensorCatMorphism) -> MorphismExpr:
    return pk.inclusion(f)


def all_objects(n_colors: int, max_len: int) -> Iterable[PKObject]:
    """Every object with at most ``max_len`` letters over ``n_colors`` colors."""
    for m in range(max_len + 1):
        for signs in itertools.product((1, -1), repeat=m):
            for cols in itertools.product(range(1, n_colors + 1), repeat=m):
                yield PKObject(tuple(Letter(s) for s in signs), cols)


__all__ = [
    "ComponentBoundaryMismatch",
    "PKObject",
    "PartialKaroubi",
    "SplitUnknown",
    "TensorCatMorphism",
    "all_objects",
    "color_sort",
    "inclusion",
    "pk_hom_member",
    "split_morphism",
    "tensor_compose",
]
