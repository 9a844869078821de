"""Normal-form arithmetic for endomorphisms of ``Q₊^⊗m``.

Every element is a combination of labels ``(a, b, σ)``: a token ``b_p`` at the
bottom of strand ``p``, then ``x^{a_p}`` dots, then the strand permutation
``σ`` drawn as crossings on top.  Tokens and dots on one strand commute, so the
part below the permutation lives in ``(F[x])^{⊗m}``.

Products straighten ``p ∘ s_i`` into ``s_i ∘ s_i(p) + ∂_i(p)``, where
``s_i(p)`` swaps strands ``i, i+1`` and ``∂_i`` is the twisted derivation
fixed by the dot-slide relation ``x_i s_i - s_i x_{i+1} = Σ_b b̌ ⊗ b``.

Permutations are stored as image tuples: the strand entering the crossing
layer at position ``p`` leaves it at position ``σ[p]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping

from .diagram import (
    DiagramTerm,
    MorphismExpr,
    ObjectWord,
    dot_box,
    s_box,
    token_box,
    up,
)
from .frobenius import FrobeniusAlgebra, as_fraction

Perm = tuple[int, ...]
Label = tuple[tuple[int, ...], tuple[int, ...], Perm]
# a polynomial-token part: (dot exponents, token basis indices) -> coefficient
Poly = dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]


class NotPositivePart(ValueError):
    """The diagram leaves the span of upward dots, tokens and crossings."""


class StrandCountMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# permutations


def perm_compose(top: Perm, bottom: Perm) -> Perm:
    """``top ∘ bottom``: apply ``bottom`` first."""
    return tuple(top[bottom[p]] for p in range(len(bottom)))


def simple(m: int, i: int) -> Perm:
    w = list(range(m))
    w[i], w[i + 1] = w[i + 1], w[i]
    return tuple(w)


def reduced_word(sigma: Perm) -> list[int]:
    """Indices ``i_1..i_r`` with ``σ = s_{i_1} ∘ … ∘ s_{i_r}``."""
    word: list[int] = []
    w = list(sigma)
    while True:
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i)
                break
        else:
            return word[::-1]


# ---------------------------------------------------------------------------
# the polynomial-token part


def _add(acc: dict, key, coef: Fraction) -> None:
    v = acc.get(key, Fraction(0)) + coef
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _poly_mul(F: FrobeniusAlgebra, top: Poly, bottom: Poly) -> Poly:
    """``top ∘ bottom`` in ``(F[x])^{⊗m}``; tokens multiply as ``top · bottom``."""
    out: Poly = {}
    for (a1, b1), c1 in top.items():
        for (a2, b2), c2 in bottom.items():
            a = tuple(p + q for p, q in zip(a1, a2))
            factors = [F.basis_product(u, v) for u, v in zip(b1, b2)]
            supports = [[(j, v) for j, v in enumerate(f) if v] for f in factors]
            for combo in itertools.product(*supports):
                coef = c1 * c2
                for _, v in combo:
                    coef *= v
                _add(out, (a, tuple(j for j, _ in combo)), coef)
    return out


def _swap_poly(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for (a, b), c in p.items():
        a2, b2 = list(a), list(b)
        a2[i], a2[i + 1] = a2[i + 1], a2[i]
        b2[i], b2[i + 1] = b2[i + 1], b2[i]
        out[(tuple(a2), tuple(b2))] = c
    return out


def _unit_poly(F: FrobeniusAlgebra, m: int) -> Poly:
    out: Poly = {}
    unit = [(j, v) for j, v in enumerate(F.unit_coords) if v]
    for combo in itertools.product(unit, repeat=m):
        coef = Fraction(1)
        for _, v in combo:
            coef *= v
        out[((0,) * m, tuple(j for j, _ in combo))] = coef
    return out


def _dots_poly(F: FrobeniusAlgebra, m: int, exps: Mapping[int, int]) -> Poly:
    a = tuple(exps.get(p, 0) for p in range(m))
    return {(a, b): c for (_, b), c in _unit_poly(F, m).items()}


_CASIMIR_CACHE: dict[int, tuple[FrobeniusAlgebra, dict]] = {}


def _casimir_table(F: FrobeniusAlgebra) -> dict:
    """``(dual_left, u, v) ↦ Σ_b`` of ``b̌u ⊗ bv`` (or ``bu ⊗ b̌v``) as a
    map from basis pairs to coefficients."""
    hit = _CASIMIR_CACHE.get(id(F))
    if hit is not None and hit[0] is F:
        return hit[1]
    table: dict = {}
    n = F.dim
    for dual_left in (True, False):
        for u in range(n):
            for v in range(n):
                acc: dict = {}
                for b in range(n):
                    for j, w in enumerate(F.dual_coords(b)):
                        if not w:
                            continue
                        left, right = (j, b) if dual_left else (b, j)
                        lu, rv = F.basis_product(left, u), F.basis_product(right, v)
                        for p, x in enumerate(lu):
                            if not x:
                                continue
                            for q, y in enumerate(rv):
                                if y:
                                    _add(acc, (p, q), w * x * y)
                table[(dual_left, u, v)] = acc
    _CASIMIR_CACHE[id(F)] = (F, table)
    return table


def _derivation(F: FrobeniusAlgebra, m: int, p: Poly, i: int) -> Poly:
    """``∂_i(p)`` with ``p ∘ s_i = s_i ∘ s_i(p) + ∂_i(p)``.

    For ``p = x_i^A x_{i+1}^C`` over tokens ``T`` this is
    ``Σ_k x_i^k Ω x_{i+1}^{A-1-k} x_i^C s(T) - Σ_k x_i^A x_{i+1}^k Ω' x_i^{C-1-k} s(T)``
    with ``Ω = Σ b̌ ⊗ b`` and ``Ω' = Σ b ⊗ b̌`` on strands ``i, i+1``.
    """
    table = _casimir_table(F)
    out: Poly = {}
    for (a, b), c in p.items():
        A, C = a[i], a[i + 1]
        if A == 0 and C == 0:
            continue
        # tokens below pass through the crossing: strand i now carries b[i+1]
        u, v = b[i + 1], b[i]
        for dual_left, n, sign in ((True, A, c), (False, C, -c)):
            for k in range(n):
                a2 = list(a)
                if dual_left:
                    a2[i], a2[i + 1] = k + C, A - 1 - k
                else:
                    a2[i], a2[i + 1] = A + C - 1 - k, k
                for (t1, t2), w in table[(dual_left, u, v)].items():
                    b2 = list(b)
                    b2[i], b2[i + 1] = t1, t2
                    _add(out, (tuple(a2), tuple(b2)), sign * w)
    return out


def _pass_word(F: FrobeniusAlgebra, m: int, p: Poly, word: list[int]) -> dict[Perm, Poly]:
    """Rewrite ``p ∘ s_{w_1} ∘ … ∘ s_{w_r}`` as ``Σ τ ∘ p_τ``."""
    if not word:
        return {tuple(range(m)): p} if p else {}
    i, rest = word[0], word[1:]
    out: dict[Perm, Poly] = {}
    for tau, q in _pass_word(F, m, _swap_poly(p, i), rest).items():
        key = perm_compose(simple(m, i), tau)
        acc = out.setdefault(key, {})
        for k2, v in q.items():
            _add(acc, k2, v)
    d = _derivation(F, m, p, i)
    if d:
        for tau, q in _pass_word(F, m, d, rest).items():
            acc = out.setdefault(tau, {})
            for k2, v in q.items():
                _add(acc, k2, v)
    return {t: q for t, q in out.items() if q}


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class AwpaElement:
    """A linear combination of normal-form labels ``(dots, tokens, σ)``."""

    algebra: FrobeniusAlgebra
    m: int
    terms: Mapping[Label, Fraction]

    def __post_init__(self):
        clean = {k: as_fraction(v) for k, v in self.terms.items() if v}
        object.__setattr__(self, "terms", clean)

    def __hash__(self) -> int:
        return hash((self.m, frozenset(self.terms.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, AwpaElement) and awpa_equal(self, other)

    def _check(self, other: "AwpaElement") -> None:
        if self.m != other.m:
            raise StrandCountMismatch(f"{self.m} strands vs {other.m} strands")

    def __add__(self, other: "AwpaElement") -> "AwpaElement":
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _add(acc, k, v)
        return AwpaElement(self.algebra, self.m, acc)

    def __neg__(self) -> "AwpaElement":
        return AwpaElement(self.algebra, self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "AwpaElement") -> "AwpaElement":
        return self + (-other)

    def scale(self, s) -> "AwpaElement":
        s = as_fraction(s)
        return AwpaElement(self.algebra, self.m, {k: s * v for k, v in self.terms.items()})

    def __rmul__(self, s) -> "AwpaElement":
        return self.scale(s)

    def __mul__(self, other):
        if isinstance(other, AwpaElement):
            return awpa_mul(self, other)
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """The largest total dot count among the labels (``-1`` for zero)."""
        return max((sum(a) for a, _, _ in self.terms), default=-1)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.algebra.basis
        parts = []
        for (a, b, sigma), c in sorted(self.terms.items()):
            strands = " ⊗ ".join((f"x^{e}·" if e else "") + names[t] for e, t in zip(a, b))
            parts.append(f"{c}·[{strands} | {list(sigma)}]")
        return " + ".join(parts)


def awpa_identity(F: FrobeniusAlgebra, m: int) -> AwpaElement:
    ident = tuple(range(m))
    return AwpaElement(F, m, {(a, b, ident): c for (a, b), c in _unit_poly(F, m).items()})


def awpa_dot(F: FrobeniusAlgebra, m: int, p: int, n: int = 1) -> AwpaElement:
    ident = tuple(range(m))
    return AwpaElement(F, m, {(a, b, ident): c for (a, b), c in _dots_poly(F, m, {p: n}).items()})


def awpa_token(F: FrobeniusAlgebra, m: int, p: int, f) -> AwpaElement:
    """``β_f`` on strand ``p``; ``f`` is an element, basis index or name."""
    from .diagram import element_coords

    ident = tuple(range(m))
    out: dict = {}
    for b, coef in element_coords(F, f):
        for (a, bs), c in _unit_poly(F, m).items():
            prod = F.basis_product(b, bs[p])
            for j, v in enumerate(prod):
                if v:
                    bs2 = tuple(j if q == p else bs[q] for q in range(m))
                    _add(out, (a, bs2, ident), coef * c * v)
    return AwpaElement(F, m, out)


def awpa_crossing(F: FrobeniusAlgebra, m: int, i: int) -> AwpaElement:
    """The crossing ``s`` of strands ``i`` and ``i+1``."""
    sigma = simple(m, i)
    return AwpaElement(F, m, {(a, b, sigma): c for (a, b), c in _unit_poly(F, m).items()})


def awpa_mul(x: AwpaElement, y: AwpaElement) -> AwpaElement:
    """``x ∘ y``: ``y`` below, ``x`` on top."""
    x._check(y)
    F, m = x.algebra, x.m
    if F is not y.algebra:
        from .frobenius import AlgebraMismatch

        raise AlgebraMismatch(f"{F.name} vs {y.algebra.name}")
    # group y by permutation so each (p, τ) pair is straightened once
    by_perm: dict[Perm, Poly] = {}
    for (a, b, tau), c in y.terms.items():
        by_perm.setdefault(tau, {})[(a, b)] = c
    out: dict = {}
    for (a1, b1, sigma), c1 in x.terms.items():
        p = {(a1, b1): c1}
        for tau, q in by_perm.items():
            for tau2, p2 in _pass_word(F, m, p, reduced_word(tau)).items():
                perm = perm_compose(sigma, tau2)
                for (a, b), c in _poly_mul(F, p2, q).items():
                    _add(out, (a, b, perm), c)
    return AwpaElement(F, m, out)


def awpa_equal(x: AwpaElement, y: AwpaElement) -> bool:
    x._check(y)
    return dict(x.terms) == dict(y.terms)


# ---------------------------------------------------------------------------
# diagrams


def awpa_from_diagram(d: DiagramTerm | MorphismExpr, F: FrobeniusAlgebra) -> AwpaElement:
    """The normal form of a diagram built from upward dots, tokens and
    crossings.  Strand colors become idempotent tokens at the bottom."""
    if isinstance(d, MorphismExpr):
        if any(l.sign != 1 for l in d.dom):
            raise NotPositivePart(f"domain {d.dom} has a downward strand")
        acc = AwpaElement(F, len(d.dom), {})
        for term, coef in d:
            acc = acc + awpa_from_diagram(term, F).scale(coef)
        return acc
    m = len(d.dom)
    if any(l.sign != 1 for l in d.dom) or any(l.sign != 1 for l in d.cod) or d.bubbles:
        raise NotPositivePart("diagram has downward strands or bubbles")
    acc = awpa_identity(F, m)
    for i, l in enumerate(d.dom):
        if l.color is not None:
            acc = awpa_mul(acc, awpa_token(F, m, i, F.idempotent(l.color)))
    for off, box in d.boxes:
        if box.kind == "s":
            gen = awpa_crossing(F, m, off)
        elif box.kind == "x":
            gen = awpa_dot(F, m, off, box.params[0])
        elif box.kind == "tok":
            gen = awpa_token(F, m, off, box.params[0])
        else:
            raise NotPositivePart(f"box {box.kind} is not an upward dot, token or crossing")
        acc = awpa_mul(gen, acc)
    return acc


def awpa_to_diagram(x: AwpaElement, colors: ObjectWord | None = None) -> MorphismExpr:
    """The uncolored diagram of ``x``: tokens, then dots, then crossings."""
    m = x.m
    dom: ObjectWord = tuple(colors) if colors is not None else (up(),) * m
    acc = MorphismExpr.zero(dom, dom)
    for (a, b, sigma), c in x.terms.items():
        boxes = [(p, token_box(up(), b[p])) for p in range(m)]
        boxes += [(p, dot_box(up(), a[p])) for p in range(m) if a[p]]
        boxes += [(i, s_box()) for i in reversed(reduced_word(sigma))]
        acc = acc + MorphismExpr.of(DiagramTerm((up(),) * m, boxes), c)
    return acc


# ---------------------------------------------------------------------------
# span bookkeeping


def labels_up_to(F: FrobeniusAlgebra, m: int, degree: int) -> list[Label]:
    """All normal-form labels with total dot degree at most ``degree``."""
    out = []
    dots = [a for a in itertools.product(range(degree + 1), repeat=m) if sum(a) <= degree]
    for a in dots:
        for b in itertools.product(range(F.dim), repeat=m):
            for sigma in itertools.permutations(range(m)):
                out.append((a, b, sigma))
    return out


def span_size(F: FrobeniusAlgebra, m: int, degree: int) -> int:
    """``|B|^m · m! · C(D+m, m)``."""
    return F.dim**m * factorial(m) * comb(degree + m, m)


def random_element(F: FrobeniusAlgebra, m: int, rng, *, max_degree: int = 3, n_terms: int = 3) -> AwpaElement:
    """A random element for property tests; ``rng`` is a :class:`random.Random`."""
    out: dict = {}
    for _ in range(n_terms):
        a = [0] * m
        for _ in range(rng.randint(0, max_degree)):
            a[rng.randrange(m)] += 1
        b = tuple(rng.randrange(F.dim) for _ in range(m))
        sigma = list(range(m))
        rng.shuffle(sigma)
        _add(out, (tuple(a), b, tuple(sigma)), Fraction(rng.randint(-3, 3)))
    return AwpaElement(F, m, out)


__all__ = [
    "AwpaElement",
    "NotPositivePart",
    "StrandCountMismatch",
    "awpa_crossing",
    "awpa_dot",
    "awpa_equal",
    "awpa_from_diagram",
    "awpa_identity",
    "awpa_mul",
    "awpa_to_diagram",
    "awpa_token",
    "labels_up_to",
    "perm_compose",
    "random_element",
    "reduced_word",
    "span_size",
]
