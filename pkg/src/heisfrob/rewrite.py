"""Oriented rewriting of diagram combinations.

Rules are either pattern rules, a small connected diagram with wildcard
parameters plus a replacement builder, or procedural rules with a custom
matcher.  Matching works on the wire graph of a term.  The matched boxes are
then gathered into one consecutive block using interchange moves only, so
matching is modulo the canonical slice order and nothing more.

``normalize`` rewrites the lowest box first, tries rules in list order, and
checks after every step that a lexicographic measure strictly decreased.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .bubbles import BubblePolynomial, bubble_value
from .diagram import (
    CAPS,
    CROSSINGS,
    CUPS,
    DECORATIONS,
    Box,
    DiagramTerm,
    MorphismExpr,
    commute,
    format_word,
    through_port,
    through_port_back,
    token_box,
)
from .frobenius import FrobeniusAlgebra


class BudgetExhausted(RuntimeError):
    """Raised by :func:`normalize` when the step budget runs out."""

    def __init__(self, partial: MorphismExpr, steps: int):
        self.partial = partial
        self.steps = steps
        super().__init__(f"rewrite budget exhausted after {steps} steps")


class MeasureViolation(AssertionError):
    pass


class _NoMatch:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "NoMatch"

    def __bool__(self) -> bool:
        return False


NoMatch = _NoMatch()


class Verdict:
    ZERO = "Zero"
    NONZERO = "NonzeroNormalForm"
    UNKNOWN = "Unknown"


# ---------------------------------------------------------------------------
# wildcards


class Var:
    """A pattern variable for colors and box parameters."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other) -> bool:
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("Var", self.name))

    def __repr__(self) -> str:
        return f"?{self.name}"

    def __lt__(self, other) -> bool:
        return repr(self) < repr(other)


def _unify(p, v, bind: dict) -> bool:
    if isinstance(p, Var):
        if p.name in bind:
            return bind[p.name] == v
        bind[p.name] = v
        return True
    return p == v


def _unify_letters(pw, tw, bind: dict) -> bool:
    if len(pw) != len(tw):
        return False
    for pl, tl in zip(pw, tw):
        if pl.sign != tl.sign or not _unify(pl.color, tl.color, bind):
            return False
    return True


def _unify_box(pb: Box, tb: Box, bind: dict) -> bool:
    if pb.kind != tb.kind or len(pb.params) != len(tb.params):
        return False
    for p, v in zip(pb.params, tb.params):
        if not _unify(p, v, bind):
            return False
    return _unify_letters(pb.dom, tb.dom, bind) and _unify_letters(pb.cod, tb.cod, bind)


# ---------------------------------------------------------------------------
# wire graph and strands


class Wiring:
    """Port connectivity of a term.

    ``src[i][p]`` is the segment feeding input ``p`` of box ``i`` and
    ``dst[seg]`` is where a segment ends.  Segments are ``("d", pos)`` for
    domain positions and ``(i, q)`` for output ``q`` of box ``i``.  A segment
    ending at the codomain maps to ``("c", pos)``.
    """

    __slots__ = ("term", "src", "dst", "seg_sign")

    def __init__(self, term: DiagramTerm):
        self.term = term
        current = [("d", p) for p in range(len(term.dom))]
        sign = {("d", p): l.sign for p, l in enumerate(term.dom)}
        src: list[list] = []
        dst: dict = {}
        for i, (off, box) in enumerate(term.boxes):
            m = len(box.dom)
            ins = current[off : off + m]
            src.append(ins)
            for p, seg in enumerate(ins):
                dst[seg] = (i, p)
            outs = [(i, q) for q in range(len(box.cod))]
            for q, l in enumerate(box.cod):
                sign[(i, q)] = l.sign
            current[off : off + m] = outs
        for pos, seg in enumerate(current):
            dst[seg] = ("c", pos)
        self.src = src
        self.dst = dst
        self.seg_sign = sign


@dataclass
class Strand:
    """Box visits along one strand in the direction of its orientation."""

    visits: list[int]
    closed: bool
    base: int | None = None
    start: tuple | None = None


def _forward(w: Wiring, seg):
    """Next (box visited, next segment) following orientation, or None."""
    boxes = w.term.boxes
    if w.seg_sign[seg] > 0:
        end = w.dst[seg]
        if end[0] == "c":
            return None
        j, p = end
        box = boxes[j][1]
        tp = through_port(box, p)
        if tp is not None:
            return j, (j, tp)
        return j, w.src[j][1 - p]
    if seg[0] == "d":
        return None
    i, q = seg
    box = boxes[i][1]
    tp = through_port_back(box, q)
    if tp is not None:
        return i, w.src[i][tp]
    return i, (i, 1 - q)


def strands(term: DiagramTerm, w: Wiring | None = None) -> list[Strand]:
    w = w or Wiring(term)
    starts = []
    for p, l in enumerate(term.dom):
        if l.sign > 0:
            starts.append(("d", p))
    for seg, end in w.dst.items():
        if end[0] == "c" and w.seg_sign[seg] < 0:
            starts.append(seg)
    seen = set()
    out = []
    for seg in starts:
        visits = []
        cur = seg
        seen.add(cur)
        while True:
            nxt = _forward(w, cur)
            if nxt is None:
                break
            j, cur = nxt
            visits.append(j)
            seen.add(cur)
        out.append(Strand(visits, False, start=seg))
    # closed loops: start right after the lowest cup on the loop
    for seg in list(w.dst):
        if seg in seen:
            continue
        loop_segs = []
        loop_visits = []
        cur = seg
        while cur not in seen:
            seen.add(cur)
            loop_segs.append(cur)
            j, cur = _forward(w, cur)
            loop_visits.append(j)
        cups = [j for j in loop_visits if w.term.boxes[j][1].kind in CUPS]
        base = min(cups) if cups else min(loop_visits)
        k = loop_visits.index(base)
        rotated = loop_visits[k + 1 :] + loop_visits[: k + 1]
        out.append(Strand(rotated, True, base))
    return out


def segment_strands(term: DiagramTerm, w: Wiring | None = None) -> tuple[dict, list[list[int]]]:
    """Map every segment to a strand index; also return each strand's visits."""
    w = w or Wiring(term)
    starts = [("d", p) for p, l in enumerate(term.dom) if l.sign > 0]
    starts += [seg for seg, end in w.dst.items() if end[0] == "c" and w.seg_sign[seg] < 0]
    owner: dict = {}
    visits: list[list[int]] = []
    for seg in starts + list(w.dst):
        if seg in owner:
            continue
        n = len(visits)
        visits.append([])
        cur = seg
        while cur is not None and cur not in owner:
            owner[cur] = n
            nxt = _forward(w, cur)
            if nxt is None:
                break
            j, cur = nxt
            visits[n].append(j)
    return owner, visits


def decoration_strand_positions(term: DiagramTerm, w: Wiring | None = None):
    """Map box index -> (strand, index in visits) for decorations."""
    pos = {}
    for st in strands(term, w):
        for n, j in enumerate(st.visits):
            if term.boxes[j][1].kind in DECORATIONS:
                pos[j] = (st, n)
    return pos


# ---------------------------------------------------------------------------
# measure


def _braid_potential(term: DiagramTerm) -> int:
    return sum(off for off, b in term.boxes if b.kind == "s")


def measure(term: DiagramTerm) -> tuple:
    """Lexicographic termination measure.

    Components: crossings, cups and caps, decorated cups and caps, upward
    crossings, bubble boxes, dot
    distance to strand ends, token distance to strand starts plus token count,
    and the sum of offsets of upward crossings.
    """
    crossings = cupcap = ups = bubs = squares = 0
    for _, b in term.boxes:
        if b.kind in ("sqcup", "sqcap"):
            squares += 1
        if b.kind in CROSSINGS:
            crossings += 1
            if b.kind == "s":
                ups += 1
        elif b.kind in CUPS or b.kind in CAPS:
            cupcap += 1
        elif b.kind == "bub":
            bubs += 1
    dot_dist = tok_dist = 0
    ndots = ntoks = 0
    if any(b.kind in DECORATIONS for _, b in term.boxes):
        for st in strands(term):
            n = len(st.visits)
            for idx, j in enumerate(st.visits):
                kind = term.boxes[j][1].kind
                if kind == "x":
                    dot_dist += n - 1 - idx
                    ndots += 1
                elif kind == "tok":
                    tok_dist += idx
                    ntoks += 1
    return (crossings, cupcap, squares, ups, bubs, dot_dist + ndots, tok_dist + ntoks, _braid_potential(term))


# ---------------------------------------------------------------------------
# rules


@dataclass
class MatchContext:
    term: DiagramTerm
    wiring: Wiring
    mapping: dict[int, int]
    algebra: FrobeniusAlgebra
    k: int
    _strands: list | None = None

    def strands(self) -> list[Strand]:
        if self._strands is None:
            self._strands = strands(self.term, self.wiring)
        return self._strands

    def strand_of_box(self, j: int) -> list[Strand]:
        return [st for st in self.strands() if j in st.visits]

    def is_loop_base(self, j: int) -> bool:
        return any(st.closed and st.base == j for st in self.strands())


Replacement = Callable[[dict], MorphismExpr]


@dataclass
class RewriteRule:
    """A rewrite rule ``pattern -> replacement``.

    ``replacement`` receives the variable binding and returns a combination
    with the same boundary as the bound pattern.  ``side_conditions`` are
    predicates ``(binding, context) -> bool``.
    """

    name: str
    pattern: DiagramTerm | None
    replacement: Replacement | None
    side_conditions: tuple = ()
    provenance: str = ""
    condition_text: str = ""
    replacement_text: str = ""
    matcher: Callable | None = None
    anchor_kinds: tuple[str, ...] = ()
    _pwiring: Wiring | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.pattern is not None:
            self._pwiring = Wiring(self.pattern)
            if not self.anchor_kinds:
                self.anchor_kinds = (self.pattern.boxes[0][1].kind,)

    def to_text(self) -> str:
        pat = "<procedural>" if self.pattern is None else pattern_text(self.pattern)
        lines = [
            f"rule {self.name}",
            f"  pattern: {pat}",
            f"  replacement: {self.replacement_text or '<computed>'}",
        ]
        if self.condition_text:
            lines.append(f"  when: {self.condition_text}")
        lines.append(f"  provenance: {self.provenance}")
        return "\n".join(lines)


def pattern_text(p: DiagramTerm) -> str:
    parts = []
    for off, b in p.boxes:
        cols = [l.color for l in b.dom + b.cod if l.color is not None]
        col = f"@{cols[0]}" if cols else ""
        params = f"({', '.join(map(str, b.params))})" if b.params else ""
        parts.append(f"{b.kind}{params}{col}[{off}]")
    return f"{format_word(p.dom)} : " + " ; ".join(parts)


@dataclass
class RuleSet:
    name: str
    rules: list[RewriteRule]
    algebra: FrobeniusAlgebra
    k: int
    colored: bool = False
    measure_description: str = (
        "lexicographic (crossings, cups+caps, decorated cups+caps, upward crossings, bubble boxes, "
        "dot distance to strand end, token distance to strand start, braid offset sum)"
    )
    scripts: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index: dict[str, list[RewriteRule]] = {}
        for r in self.rules:
            for kind in r.anchor_kinds:
                self._index.setdefault(kind, []).append(r)

    def by_anchor(self, kind: str) -> list[RewriteRule]:
        return self._index.get(kind, [])

    def subset(self, names: Iterable[str] | None = None, exclude: Iterable[str] = ()) -> "RuleSet":
        ex = set(exclude)
        keep = [r for r in self.rules if (names is None or r.name in set(names)) and r.name not in ex]
        return RuleSet(self.name, keep, self.algebra, self.k, self.colored, self.measure_description, self.scripts)

    def get(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self) -> str:
        head = [f"ruleset {self.name} (k={self.k}, algebra={self.algebra.name})", f"measure: {self.measure_description}"]
        return "\n".join(head + [r.to_text() for r in self.rules]) + "\n"


# ---------------------------------------------------------------------------
# matching


@dataclass
class Match:
    rule: RewriteRule
    binding: dict
    boxes: list  # reordered (offset, box) list
    lo: int
    hi: int
    origin: int


def _map_pattern(rule: RewriteRule, term: DiagramTerm, w: Wiring, anchor: int):
    pat = rule.pattern
    pw = rule._pwiring
    np_ = len(pat.boxes)
    bind: dict = {}
    if not _unify_box(pat.boxes[0][1], term.boxes[anchor][1], bind):
        return None
    mapping = {0: anchor}
    used = {anchor}
    queue = [0]
    while queue:
        a = queue.pop()
        ja = mapping[a]
        pbox = pat.boxes[a][1]
        # outputs
        for q in range(len(pbox.cod)):
            pend = pw.dst[(a, q)]
            if pend[0] == "c":
                continue
            b, p = pend
            tend = w.dst[(ja, q)]
            if tend[0] == "c" or tend[1] != p:
                return None
            jb = tend[0]
            if b in mapping:
                if mapping[b] != jb:
                    return None
                continue
            if jb in used or not _unify_box(pat.boxes[b][1], term.boxes[jb][1], bind):
                return None
            mapping[b] = jb
            used.add(jb)
            queue.append(b)
        # inputs
        for p in range(len(pbox.dom)):
            pseg = pw.src[a][p]
            if pseg[0] == "d":
                continue
            b, q = pseg
            tseg = w.src[ja][p]
            if tseg[0] == "d" or tseg[1] != q:
                return None
            jb = tseg[0]
            if b in mapping:
                if mapping[b] != jb:
                    return None
                continue
            if jb in used or not _unify_box(pat.boxes[b][1], term.boxes[jb][1], bind):
                return None
            mapping[b] = jb
            used.add(jb)
            queue.append(b)
    if len(mapping) != np_:
        return None
    # boundary ports of the pattern must not connect two matched boxes
    for a in range(np_):
        ja = mapping[a]
        pbox = pat.boxes[a][1]
        for q in range(len(pbox.cod)):
            if pw.dst[(a, q)][0] == "c":
                tend = w.dst[(ja, q)]
                if tend[0] != "c" and tend[0] in used:
                    return None
        for p in range(len(pbox.dom)):
            if pw.src[a][p][0] == "d":
                tseg = w.src[ja][p]
                if tseg[0] != "d" and tseg[0] in used:
                    return None
    return bind, mapping


def _gather(term: DiagramTerm, mapping: dict[int, int]):
    inv = {j: a for a, j in mapping.items()}
    W = [(off, box, inv.get(j)) for j, (off, box) in enumerate(term.boxes)]
    lo = min(mapping.values())
    hi = max(mapping.values())

    def swap(i):
        # W[i] lower, W[i+1] upper
        r = commute(W[i][:2], W[i + 1][:2])
        if r is None:
            return False
        (o1, b1), (o2, b2) = r
        W[i], W[i + 1] = (o1, b1, W[i + 1][2]), (o2, b2, W[i][2])
        return True

    i = lo + 1
    while i <= hi:
        if W[i][2] is None:
            j = i
            while j > lo and swap(j - 1):
                j -= 1
            if j == lo:
                lo += 1
        i += 1
    i = hi - 1
    while i >= lo:
        if W[i][2] is None:
            j = i
            while j < hi and swap(j):
                j += 1
            if j == hi:
                hi -= 1
        i -= 1
    if any(W[x][2] is None for x in range(lo, hi + 1)):
        return None
    # order the block as in the pattern
    changed = True
    while changed:
        changed = False
        for x in range(lo, hi):
            if W[x][2] > W[x + 1][2]:
                if not swap(x):
                    return None
                changed = True
    return W, lo, hi


def _word_at(term: DiagramTerm, W, idx: int):
    w = list(term.dom)
    for off, box, _ in W[:idx]:
        w[off : off + len(box.dom)] = box.cod
    return w


def find_match(rule: RewriteRule, term: DiagramTerm, w: Wiring, anchor: int, algebra, k) -> Match | None:
    if rule.pattern is None:
        return None
    mp = _map_pattern(rule, term, w, anchor)
    if mp is None:
        return None
    bind, mapping = mp
    if rule.side_conditions:
        ctx = MatchContext(term, w, mapping, algebra, k)
        for cond in rule.side_conditions:
            if not cond(bind, ctx):
                return None
    g = _gather(term, mapping)
    if g is None:
        return None
    W, lo, hi = g
    pat = rule.pattern
    origin = W[lo][0] - pat.boxes[0][0]
    for t in range(len(pat.boxes)):
        if W[lo + t][0] != origin + pat.boxes[t][0]:
            return None
    word = _word_at(term, W, lo)
    seg = word[origin : origin + len(pat.dom)]
    if origin < 0 or not _unify_letters(pat.dom, seg, bind):
        return None
    return Match(rule, bind, W, lo, hi, origin)


def apply_match(term: DiagramTerm, m: Match) -> list[tuple[Fraction, DiagramTerm]]:
    rhs = m.rule.replacement(m.binding)
    prefix = [(o, b) for o, b, _ in m.boxes[: m.lo]]
    suffix = [(o, b) for o, b, _ in m.boxes[m.hi + 1 :]]
    out = []
    for frag, coef in rhs.terms.items():
        boxes = prefix + [(m.origin + o, b) for o, b in frag.boxes] + suffix
        out.append((coef, DiagramTerm(term.dom, boxes, term.bubbles + frag.bubbles)))
    return out


# ---------------------------------------------------------------------------
# procedural rules


@dataclass
class ProcResult:
    replacement: list[tuple[Fraction, DiagramTerm]]


def first_rewrite(term: DiagramTerm, rs: RuleSet):
    """Lowest box first, rules in list order.  Returns (rule, replacement)."""
    if not term.boxes:
        return None
    w = Wiring(term)
    for idx, (off, box) in enumerate(term.boxes):
        for rule in rs.by_anchor(box.kind):
            if rule.matcher is not None:
                res = rule.matcher(term, w, idx, rs)
                if res is not None:
                    return rule, res
                continue
            m = find_match(rule, term, w, idx, rs.algebra, rs.k)
            if m is not None:
                return rule, apply_match(term, m)
    return None


# ---------------------------------------------------------------------------
# bubble monomials and token filling


def normalize_bubbles(term: DiagramTerm) -> list[tuple[Fraction, DiagramTerm]]:
    """Rewrite the bubble monomial of a term in generating symbols."""
    if not term.bubbles:
        return [(Fraction(1), term)]
    poly = BubblePolynomial.scalar(1)
    for b in term.bubbles:
        poly = poly * bubble_value(b)
        if poly.is_zero():
            return []
    bare = DiagramTerm(term.dom, term.boxes, (), canonical=True, cod=term.cod)
    return [(c, bare.with_bubbles(mono)) for mono, c in poly.terms.items()]


def _bubbles_normal(term: DiagramTerm) -> bool:
    from .bubbles import is_generator

    return all(is_generator(b) and b.is_basis_token() for b in term.bubbles)


def fill_tokens(term: DiagramTerm, F: FrobeniusAlgebra) -> list[tuple[Fraction, DiagramTerm]]:
    """Give every strand without a token a unit token at its start."""
    w = Wiring(term)
    inserts = []  # (position in box list, offset, letter)
    for st in strands(term, w):
        if any(term.boxes[j][1].kind == "tok" for j in st.visits):
            continue
        if st.closed:
            base = st.base
            off, box = term.boxes[base]
            # the upward leg of the base cup leaves it
            q = next(q for q, l in enumerate(box.cod) if l.sign > 0)
            inserts.append((base + 1, off + q, box.cod[q], base))
            continue
        # an open strand starts at the bottom if it points up, else at the top
        seg = st.start
        if seg[0] == "d":
            inserts.append((0, seg[1], term.dom[seg[1]], None))
        else:
            pos = w.dst[seg][1]
            inserts.append((len(term.boxes), pos, term.cod[pos], None))
    if not inserts:
        return [(Fraction(1), term)]
    results = [(Fraction(1), list(term.boxes), [])]
    # insert from the top of the list down so indices stay valid
    inserts.sort(key=lambda t: (t[0], t[1]), reverse=True)
    for pos, off, letter, _ in inserts:
        basis = F.component_basis(letter.color)
        unit = F.one if letter.color is None else F.idempotent(letter.color)
        nxt = []
        for coef, boxes, _ in results:
            for b in basis:
                u = unit.coords[b]
                if u == 0:
                    continue
                nb = list(boxes)
                nb.insert(pos, (off, token_box(letter, b)))
                nxt.append((coef * u, nb, []))
        results = nxt
    return [(c, DiagramTerm(term.dom, bx, term.bubbles)) for c, bx, _ in results]


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalizeResult:
    expr: MorphismExpr
    steps: int
    spanning_form: bool
    rules_used: dict = field(default_factory=dict)


def _pick(pending: dict[DiagramTerm, Fraction]) -> DiagramTerm:
    return max(pending, key=lambda t: (measure(t), t.sort_key()))


def normalize_full(
    m: MorphismExpr,
    rs: RuleSet,
    budget: int = 20000,
    *,
    fill: bool = True,
    check_measure: bool = True,
) -> NormalizeResult:
    """Rewrite to a fixpoint and report steps and the spanning-form flag."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    pending: dict[DiagramTerm, Fraction] = {}
    done: dict[DiagramTerm, Fraction] = {}

    def add(t: DiagramTerm, c: Fraction) -> None:
        if c == 0:
            return
        for c2, t2 in normalize_bubbles(t):
            cc = c * c2
            target = done if t2 in done else pending
            v = target.get(t2, Fraction(0)) + cc
            if v == 0:
                target.pop(t2, None)
            else:
                target[t2] = v

    for t, c in m.terms.items():
        add(t, c)
    steps = 0
    used: dict[str, int] = {}
    while pending:
        while pending:
            t = _pick(pending)
            c = pending.pop(t)
            rw = first_rewrite(t, rs)
            if rw is None:
                done[t] = done.get(t, Fraction(0)) + c
                if done[t] == 0:
                    del done[t]
                continue
            rule, repl = rw
            steps += 1
            used[rule.name] = used.get(rule.name, 0) + 1
            if check_measure:
                mu = measure(t)
                for _, nt in repl:
                    if not measure(nt) < mu:
                        raise MeasureViolation(
                            f"rule {rule.name} did not decrease the measure: {mu} -> {measure(nt)}\n{t!r}\n-> {nt!r}"
                        )
            for c2, nt in repl:
                add(nt, c * c2)
            if steps >= budget:
                partial = dict(done)
                for pt, pc in pending.items():
                    partial[pt] = partial.get(pt, Fraction(0)) + pc
                raise BudgetExhausted(MorphismExpr(partial, m.dom, m.cod), steps)
        if not fill:
            break
        # filled tokens can enable further moves (bubbles hopping colors)
        filled: dict[DiagramTerm, Fraction] = {}
        for t, c in done.items():
            for c2, t2 in fill_tokens(t, rs.algebra):
                filled[t2] = filled.get(t2, Fraction(0)) + c * c2
        done = {}
        for t, c in filled.items():
            if c == 0:
                continue
            if first_rewrite(t, rs) is None:
                done[t] = c
            else:
                pending[t] = c
    expr = MorphismExpr(done, m.dom, m.cod)
    return NormalizeResult(expr, steps, all(spanning_form(t) for t in done), used)


def normalize(m: MorphismExpr, rs: RuleSet, budget: int = 20000) -> MorphismExpr:
    """Normal form of ``m``; raises :class:`BudgetExhausted` past ``budget`` steps."""
    return normalize_full(m, rs, budget).expr


def spanning_form(term: DiagramTerm) -> bool:
    """The five spanning-set conditions for a single term."""
    if any(b.kind == "bub" for _, b in term.boxes):
        return False
    w = Wiring(term)
    sts = strands(term, w)
    if any(st.closed for st in sts):
        return False
    owner: dict[int, list[int]] = {}
    for n, st in enumerate(sts):
        kinds = [term.boxes[j][1].kind for j in st.visits]
        if sum(1 for k in kinds if k in CUPS or k in CAPS) > 1:
            return False
        crossings = [j for j in st.visits if term.boxes[j][1].kind in CROSSINGS]
        if len(crossings) != len(set(crossings)):
            return False
        for j in crossings:
            owner.setdefault(j, []).append(n)
        # dots at the end: no crossing after a dot
        seen_dot = False
        for j in st.visits:
            k = term.boxes[j][1].kind
            if k == "x":
                seen_dot = True
            elif seen_dot and k in CROSSINGS:
                return False
    pairs = [tuple(sorted(v)) for v in owner.values()]
    return len(pairs) == len(set(pairs))


def equal_zero(m: MorphismExpr, rs: RuleSet, budget: int = 20000) -> str:
    try:
        res = normalize_full(m, rs, budget)
    except BudgetExhausted:
        return Verdict.UNKNOWN
    return Verdict.ZERO if res.expr.is_zero() else Verdict.NONZERO


def check_equal(a: MorphismExpr, b: MorphismExpr, rs: RuleSet, budget: int = 20000) -> str:
    return equal_zero(a - b, rs, budget)


def apply_rule_once(m: MorphismExpr, r: RewriteRule, position=None, rs: RuleSet | None = None):
    """Apply ``r`` once at ``position`` = ``(term index, box index)``.

    Terms are indexed in sorted order.  With ``position=None`` the first match
    in lowest-box order is used.  Returns :data:`NoMatch` if nothing applies.
    """
    items = m.sorted_items()
    F = rs.algebra if rs else None
    k = rs.k if rs else 0
    candidates = []
    if position is None:
        for ti, (t, _) in enumerate(items):
            for bi in range(len(t.boxes)):
                candidates.append((ti, bi))
    else:
        candidates = [tuple(position)]
    for ti, bi in candidates:
        if ti >= len(items):
            continue
        t, c = items[ti]
        if bi >= len(t.boxes):
            continue
        w = Wiring(t)
        if r.matcher is not None:
            if rs is None:
                raise ValueError("procedural rules need a rule set for context")
            res = r.matcher(t, w, bi, rs)
            if res is None:
                continue
            repl = res
        else:
            if t.boxes[bi][1].kind not in r.anchor_kinds:
                continue
            mt = find_match(r, t, w, bi, F, k)
            if mt is None:
                continue
            repl = apply_match(t, mt)
        acc = {tt: cc for tt, cc in m.terms.items() if tt != t}
        for c2, nt in repl:
            acc[nt] = acc.get(nt, Fraction(0)) + c * c2
        return MorphismExpr(acc, m.dom, m.cod)
    return NoMatch
