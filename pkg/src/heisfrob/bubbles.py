"""Dotted bubbles in ``End(𝟙)``.

A bubble is a closed oriented loop carrying ``r`` dots (``r`` may be
negative) and a token ``f``.  Bubbles below the evaluation threshold are
scalars.  Bubbles with negative dot count are defined by determinants of
bubbles of the opposite orientation.  Everything else is a genuine element of
``End(𝟙)`` and is kept as a formal commuting symbol.

Genuine bubbles of both orientations are tied together by the infinite
Grassmannian relation.  To get a normal form, :func:`bubble_value` writes every
bubble in terms of one orientation only: clockwise when ``k >= 0`` and
counterclockwise when ``k < 0``.  The other orientation is expressed by the
same determinant formula that defines the negatively dotted bubbles, applied
past the fake range.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .frobenius import AlgebraElement, FrobeniusAlgebra

CW = "cw"
CCW = "ccw"


class NotInFakeRange(ValueError):
    pass


class Undetermined:
    """Marker returned by :func:`eval_circle` for genuine bubbles."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Undetermined"

    def __bool__(self) -> bool:
        return False


UNDETERMINED = Undetermined()


@dataclass(frozen=True)
class BubbleSymbol:
    orientation: str
    dots: int
    token: AlgebraElement
    color: int | None
    k: int

    def __post_init__(self):
        if self.orientation not in (CW, CCW):
            raise ValueError("orientation must be 'cw' or 'ccw'")
        F = self.token.algebra
        if self.color is not None:
            outside = [b for b, _ in self.token.support() if F.color_of(b) != self.color]
            if outside:
                raise ValueError(f"token of a color-{self.color} bubble must lie in F_{self.color}")

    @property
    def algebra(self) -> FrobeniusAlgebra:
        return self.token.algebra

    def sort_key(self):
        return (self.color or 0, self.orientation, self.dots, self.token.coords, self.k)

    def with_token(self, token: AlgebraElement) -> "BubbleSymbol":
        return BubbleSymbol(self.orientation, self.dots, token, self.color, self.k)

    def __repr__(self) -> str:
        col = "" if self.color is None else f"@{self.color}"
        return f"{self.orientation}{col}(dots={self.dots}, {self.token!r})"

    def is_basis_token(self) -> bool:
        sup = self.token.support()
        return len(sup) == 1 and sup[0][1] == 1


def _partial_trace(F: FrobeniusAlgebra, f: AlgebraElement, color: int | None) -> Fraction:
    if color is None:
        return f.trace()
    return F.project(f, color).trace()


def eval_circle(b: BubbleSymbol) -> Fraction | Undetermined:
    """Scalar value of a bubble below its evaluation threshold.

    Clockwise bubbles with ``r <= k-1`` dots give ``-δ_{r,k-1} tr_i(f)``;
    counterclockwise ones with ``r <= -k-1`` give ``δ_{r,-k-1} tr_i(f)``.
    """
    F = b.algebra
    if b.orientation == CW and b.dots <= b.k - 1:
        return -_partial_trace(F, b.token, b.color) if b.dots == b.k - 1 else Fraction(0)
    if b.orientation == CCW and b.dots <= -b.k - 1:
        return _partial_trace(F, b.token, b.color) if b.dots == -b.k - 1 else Fraction(0)
    return UNDETERMINED


# ---------------------------------------------------------------------------
# polynomials in commuting bubble symbols

Monomial = tuple[BubbleSymbol, ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b, key=BubbleSymbol.sort_key))


class BubblePolynomial:
    """A linear combination of monomials in commuting bubble symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in (terms or {}).items() if c != 0
        }

    @classmethod
    def scalar(cls, c) -> "BubblePolynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def symbol(cls, s: BubbleSymbol, coef=1) -> "BubblePolynomial":
        return cls({(s,): Fraction(coef)})

    def __add__(self, other: "BubblePolynomial") -> "BubblePolynomial":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return BubblePolynomial(acc)

    def __neg__(self) -> "BubblePolynomial":
        return BubblePolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "BubblePolynomial") -> "BubblePolynomial":
        return self + (-other)

    def __mul__(self, other) -> "BubblePolynomial":
        if not isinstance(other, BubblePolynomial):
            c = Fraction(other)
            return BubblePolynomial({m: c * v for m, v in self.terms.items()})
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return BubblePolynomial(acc)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BubblePolynomial.scalar(other)
        return isinstance(other, BubblePolynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(m == () for m in self.terms)

    @property
    def scalar_part(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: [s.sort_key() for s in kv[0]]):
            body = "·".join(repr(s) for s in m)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# normal form of a single bubble


def _basis_of(F: FrobeniusAlgebra, color: int | None) -> tuple[int, ...]:
    return F.component_basis(color)


def is_generator(b: BubbleSymbol) -> bool:
    """Bubbles kept as symbols in normal form."""
    if b.k >= 0:
        return b.orientation == CW and b.dots >= b.k
    return b.orientation == CCW and b.dots >= -b.k


def bubble_value(b: BubbleSymbol) -> BubblePolynomial:
    """Express a bubble in the generating symbols (tokens expanded over the basis)."""
    F = b.algebra
    return _bubble_value(b.orientation, b.dots, b.token.coords, b.color, b.k, id(F), F)


_VALUE_CACHE: dict = {}


def _bubble_value(orient, dots, coords, color, k, fid, F) -> BubblePolynomial:
    key = (orient, dots, coords, color, k, fid)
    hit = _VALUE_CACHE.get(key)
    if hit is not None and hit[0] is F:
        return hit[1]
    token = AlgebraElement(F, coords)
    sym = BubbleSymbol(orient, dots, token, color, k)
    val = eval_circle(sym)
    if val is not UNDETERMINED:
        out = BubblePolynomial.scalar(val)
    elif is_generator(sym):
        out = BubblePolynomial()
        for idx, c in token.support():
            basis_sym = BubbleSymbol(orient, dots, F.basis_element(idx), color, k)
            out = out + BubblePolynomial.symbol(basis_sym, c)
    else:
        out = determinant_expansion(sym, extended=True)
    if len(_VALUE_CACHE) > 200000:
        _VALUE_CACHE.clear()
    _VALUE_CACHE[key] = (F, out)
    return out


def determinant_expansion(b: BubbleSymbol, *, extended: bool = False) -> BubblePolynomial:
    """Sum over dual-basis chains of the determinant of opposite bubbles.

    For a counterclockwise bubble with ``r-k-1`` dots this is
    ``Σ_{b_1..b_{r-1}} det(cw(i-j+k, b̌_{j-1} b_j))`` with ``b̌_0 = f`` and
    ``b_r = 1``; the clockwise case carries the sign ``(-1)^{r+1}`` and
    counterclockwise entries with ``i-j-k`` dots.  The determinant is
    ``tr(f)`` at ``r = 0`` and ``0`` for ``r < 0``.
    """
    F = b.algebra
    k = b.k
    if b.orientation == CCW:
        r = b.dots + k + 1
        entry_orient, shift, sign = CW, k, 1
        in_range = r <= k
    else:
        r = b.dots - k + 1
        entry_orient, shift, sign = CCW, -k, (-1) ** (r + 1)
        in_range = r <= -k
    if not in_range and not extended:
        raise NotInFakeRange(f"{b!r} is not a negatively dotted bubble for k={k}")
    if r < 0:
        return BubblePolynomial()
    if r == 0:
        return BubblePolynomial.scalar(sign * _partial_trace(F, b.token, b.color))
    basis = _basis_of(F, b.color)
    dual = {x: AlgebraElement(F, F.dual_coords(x)) for x in basis}
    unit = F.one if b.color is None else F.idempotent(b.color)

    def entry(i: int, j: int, left: AlgebraElement, right: AlgebraElement) -> BubblePolynomial:
        tok = left * right
        if tok.is_zero():
            return BubblePolynomial()
        return _bubble_value(entry_orient, i - j + shift, tok.coords, b.color, k, id(F), F)

    # column-by-column expansion: state = (rows used, b_j) -> polynomial
    states: dict[tuple[int, int | None], BubblePolynomial] = {(0, None): BubblePolynomial.scalar(1)}
    for j in range(1, r + 1):
        nxt: dict[tuple[int, int | None], BubblePolynomial] = {}
        for (used, prev), poly in states.items():
            left = b.token if j == 1 else dual[prev]
            rights = [(None, unit)] if j == r else [(x, F.basis_element(x)) for x in basis]
            for i in range(1, r + 1):
                bit = 1 << (i - 1)
                if used & bit:
                    continue
                inversions = bin(used >> i).count("1")
                sgn = -1 if inversions % 2 else 1
                for bj, right in rights:
                    e = entry(i, j, left, right)
                    if e.is_zero():
                        continue
                    key = (used | bit, bj)
                    contrib = poly * e * sgn
                    nxt[key] = nxt[key] + contrib if key in nxt else contrib
        states = nxt
    total = BubblePolynomial()
    for poly in states.values():
        total = total + poly
    return total * sign


def expand_negative_bubble(b: BubbleSymbol) -> BubblePolynomial:
    """Determinant expansion of a bubble in the negative (fake) range."""
    return determinant_expansion(b, extended=False)


# ---------------------------------------------------------------------------
# infinite grassmannian relation


@dataclass
class GrassmannianReport:
    ok: bool
    lhs_integer_form: BubblePolynomial
    lhs_shifted_form: BubblePolynomial
    expected: BubblePolynomial

    def diff(self) -> str:
        lines = []
        if self.lhs_integer_form != self.expected:
            lines.append(f"integer-indexed sum: {self.lhs_integer_form!r} != {self.expected!r}")
        if self.lhs_shifted_form != self.expected:
            lines.append(f"shifted sum: {self.lhs_shifted_form!r} != {self.expected!r}")
        return "\n".join(lines) or "ok"

    def __bool__(self) -> bool:
        return self.ok


def _pair_sum(F, f, g, color, k, pairs: Iterable[tuple[int, int]]) -> BubblePolynomial:
    basis = _basis_of(F, color)
    total = BubblePolynomial()
    for r, s in pairs:
        for b in basis:
            fb = f * F.basis_element(b)
            bg = AlgebraElement(F, F.dual_coords(b)) * g
            if fb.is_zero() or bg.is_zero():
                continue
            left = bubble_value(BubbleSymbol(CW, r, fb, color, k))
            if left.is_zero():
                continue
            right = bubble_value(BubbleSymbol(CCW, s, bg, color, k))
            total = total + left * right
    return total


def grassmannian_report(f: AlgebraElement, g: AlgebraElement, t: int, k: int, i: int | None) -> GrassmannianReport:
    F = f.algebra
    if i is not None:
        f = F.project(f, i)
        g = F.project(g, i)
    # clockwise vanishes below k-1 dots and counterclockwise below -k-1
    lo_r, lo_s = k - 1, -k - 1
    integer_pairs = [(r, t - 2 - r) for r in range(lo_r, t - 2 - lo_s + 1)]
    shifted_pairs = [(r + k - 1, (t - r) - k - 1) for r in range(0, t + 1)]
    lhs1 = _pair_sum(F, f, g, i, k, integer_pairs)
    lhs2 = _pair_sum(F, f, g, i, k, shifted_pairs)
    fg = f * g
    expected = BubblePolynomial.scalar(-_partial_trace(F, fg, i) if t == 0 else 0)
    return GrassmannianReport(lhs1 == expected and lhs2 == expected, lhs1, lhs2, expected)


def grassmannian_check(f: AlgebraElement, g: AlgebraElement, t: int, k: int, i: int | None = None):
    """Check the infinite Grassmannian relation for one ``t``.

    Returns ``(ok, report)``; ``report.diff()`` lists any mismatch.
    """
    rep = grassmannian_report(f, g, t, k, i)
    return rep.ok, rep


def grassmannian_sweep(F: FrobeniusAlgebra, k: int, max_t: int = 6) -> list[tuple[str, GrassmannianReport]]:
    """Check every basis pair ``f, g``, every color (and the uncolored
    relation) and every ``|t| <= max_t``.  Returns labelled reports."""
    colors: list[int | None] = [None] + list(range(1, F.n_colors + 1)) if F.partitioned else [None]
    out = []
    for i in colors:
        basis = _basis_of(F, i)
        for a in basis:
            for b in basis:
                f, g = F.basis_element(a), F.basis_element(b)
                for t in range(-max_t, max_t + 1):
                    col = "" if i is None else f"@{i}"
                    label = f"grassmannian{col} f={F.basis[a]} g={F.basis[b]} t={t}"
                    out.append((label, grassmannian_report(f, g, t, k, i)))
    return out
