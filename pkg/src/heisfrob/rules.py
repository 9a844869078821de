"""Rewrite rules for the Heisenberg presentations.

All presentations share one normal form.  Strands carry their tokens at the
start and their dots at the end, crossings are upward ``s`` or the sideways
``t`` and ``t'``, and every turn is one of ``c, d, c', d'``.  Decorated cups
and caps are rewritten into ``c'`` and ``d'`` forms, so the Def-style and the
alternate presentations land in the same normal forms.

Rules are built per algebra, central charge and coloring.  In colored rule
sets every letter carries a color and correction sums carry ``δ_{i,j}``.
"""

from __future__ import annotations

from fractions import Fraction

from .bubbles import CCW, CW, BubbleSymbol, bubble_value
from .diagram import (
    Box,
    DiagramTerm,
    Letter,
    MorphismExpr,
    bubble_box,
    c_box,
    commute,
    compose,
    compose_all,
    cp_box,
    d_box,
    dp_box,
    dots,
    from_box,
    identity,
    s_box,
    t_box,
    tensor,
    token,
    token_box,
    tp_box,
)
from .frobenius import AlgebraElement, FrobeniusAlgebra
from .rewrite import RewriteRule, RuleSet, Var, Wiring, _gather, segment_strands, strands

I, J, A, B, N, M, R = (Var(n) for n in ("i", "j", "a", "b", "n", "m", "r"))


def U(c=None) -> Letter:
    return Letter(1, c)


def D(c=None) -> Letter:
    return Letter(-1, c)


def pat(dom, boxes) -> DiagramTerm:
    return DiagramTerm(tuple(dom), boxes)


def xbox(letter, n) -> Box:
    return Box("x", (letter,), (letter,), (n,))


class _Ctx:
    """Concrete morphism builders for one algebra and coloring."""

    def __init__(self, F: FrobeniusAlgebra, k: int, colored: bool):
        self.F = F
        self.k = k
        self.colored = colored

    def basis(self, i):
        return self.F.component_basis(i)

    def dual(self, b: int) -> AlgebraElement:
        return AlgebraElement(self.F, self.F.dual_coords(b))

    def el(self, b: int) -> AlgebraElement:
        return self.F.basis_element(b)

    def delta(self, i, j) -> bool:
        return (not self.colored) or i == j

    def tok(self, f, l: Letter) -> MorphismExpr:
        return token(self.F, f, l)

    def x(self, n: int, l: Letter) -> MorphismExpr:
        return dots(n, l)

    def bub(self, orient: str, r: int, f: AlgebraElement, color, side: str, w) -> MorphismExpr:
        """A bubble placed just right (or left) of the identity on ``w``."""
        poly = bubble_value(BubbleSymbol(orient, r, f, color, self.k))
        out = MorphismExpr.zero(tuple(w), tuple(w))
        for mono, coef in poly.terms.items():
            e = identity(tuple(w))
            for sym in mono:
                bb = from_box(bubble_box(sym))
                e = tensor(e, bb) if side == "right" else tensor(bb, e)
            out = out + e.scale(coef)
        return out


# ---------------------------------------------------------------------------
# rule families


def _rule(name, pattern, rhs, provenance, text="", conditions=(), cond_text=""):
    return RewriteRule(
        name=name,
        pattern=pattern,
        replacement=rhs,
        side_conditions=tuple(conditions),
        provenance=provenance,
        replacement_text=text,
        condition_text=cond_text,
    )


def _not_base(cup_index: int):
    def cond(bind, ctx) -> bool:
        return not ctx.is_loop_base(ctx.mapping[cup_index])

    return cond


def wreath_rules(X: _Ctx) -> list[RewriteRule]:
    out = []
    prov = "defining relation: affine wreath product algebra"
    # tokens merge
    out.append(
        _rule(
            "token-merge-up",
            pat([U(I)], [(0, token_box(U(I), A)), (0, token_box(U(I), B))]),
            lambda b: X.tok(X.el(b["b"]) * X.el(b["a"]), U(b["i"])),
            prov + ", token homomorphism",
            "β_b β_a = β_{ba}",
        )
    )
    out.append(
        _rule(
            "token-merge-down",
            pat([D(I)], [(0, token_box(D(I), A)), (0, token_box(D(I), B))]),
            lambda b: X.tok(X.el(b["a"]) * X.el(b["b"]), D(b["i"])),
            "derived: token homomorphism rotated by the right adjunction",
            "β⁻_b β⁻_a = β⁻_{ab}",
        )
    )
    for sgn, L in ((1, U), (-1, D)):
        tag = "up" if sgn > 0 else "down"
        out.append(
            _rule(
                f"dot-merge-{tag}",
                pat([L(I)], [(0, xbox(L(I), N)), (0, xbox(L(I), M))]),
                lambda b, L=L: X.x(b["n"] + b["m"], L(b["i"])),
                "composition of dots",
                "x^m x^n = x^{m+n}",
            )
        )
    out.append(
        _rule(
            "dot-token-up",
            pat([U(I)], [(0, xbox(U(I), N)), (0, token_box(U(I), A))]),
            lambda b: compose(X.x(b["n"], U(b["i"])), X.tok(b["a"], U(b["i"]))),
            prov + ", dots commute with tokens",
            "β_a x^n = x^n β_a",
        )
    )
    out.append(
        _rule(
            "dot-token-down",
            pat([D(I)], [(0, token_box(D(I), A)), (0, xbox(D(I), N))]),
            lambda b: compose(X.tok(b["a"], D(b["i"])), X.x(b["n"], D(b["i"]))),
            "derived: dots commute with tokens, rotated",
            "x⁻^n β⁻_a = β⁻_a x⁻^n",
        )
    )
    out.append(
        _rule(
            "doublecross-up",
            pat([U(I), U(J)], [(0, s_box(I, J)), (0, s_box(J, I))]),
            lambda b: identity((U(b["i"]), U(b["j"]))),
            prov + ", s² = 1",
            "s s = 1",
        )
    )
    out.append(
        _rule(
            "braid",
            pat(
                [U(I), U(J), U(Var("l"))],
                [(1, s_box(J, Var("l"))), (0, s_box(I, Var("l"))), (1, s_box(I, J))],
            ),
            lambda b: _braid_rhs(b),
            prov + ", braid relation",
            "(1⊗s)(s⊗1)(1⊗s) = (s⊗1)(1⊗s)(s⊗1)",
        )
    )
    # tokens slide down through upward crossings
    out.append(
        _rule(
            "tokenslide-left",
            pat([U(I), U(J)], [(0, s_box(I, J)), (0, token_box(U(J), A))]),
            lambda b: compose(from_box(s_box(b["i"], b["j"])), tensor(identity((U(b["i"]),)), X.tok(b["a"], U(b["j"])))),
            prov + ", token slide",
            "(β⊗1)s = s(1⊗β)",
        )
    )
    out.append(
        _rule(
            "tokenslide-right",
            pat([U(I), U(J)], [(0, s_box(I, J)), (1, token_box(U(I), A))]),
            lambda b: compose(from_box(s_box(b["i"], b["j"])), tensor(X.tok(b["a"], U(b["i"])), identity((U(b["j"]),)))),
            prov + ", token slide",
            "(1⊗β)s = s(β⊗1)",
        )
    )

    def dotslide_right_to_left(b):
        i, j, n = b["i"], b["j"], b["n"]
        sb = from_box(s_box(i, j))
        main = compose(tensor(X.x(n, U(j)), identity((U(i),))), sb)
        if not X.delta(i, j):
            return main
        corr = MorphismExpr.zero((U(i), U(j)), (U(j), U(i)))
        for bb in X.basis(i):
            for jj in range(n):
                corr = corr + tensor(
                    compose(X.x(jj, U(i)), X.tok(X.dual(bb), U(i))),
                    compose(X.x(n - 1 - jj, U(i)), X.tok(bb, U(i))),
                )
        return main - corr

    out.append(
        _rule(
            "dotslide-right",
            pat([U(I), U(J)], [(1, xbox(U(J), N)), (0, s_box(I, J))]),
            dotslide_right_to_left,
            prov + ", dot slide",
            "s(1⊗x^n) = (x^n⊗1)s - δ Σ_j Σ_b x^j β_b̌ ⊗ β_b x^{n-1-j}",
        )
    )

    def dotslide_left_to_right(b):
        i, j, n = b["i"], b["j"], b["n"]
        sb = from_box(s_box(i, j))
        main = compose(tensor(identity((U(j),)), X.x(n, U(i))), sb)
        if not X.delta(i, j):
            return main
        corr = MorphismExpr.zero((U(i), U(j)), (U(j), U(i)))
        for bb in X.basis(i):
            for jj in range(n):
                corr = corr + tensor(
                    compose(X.x(n - 1 - jj, U(i)), X.tok(bb, U(i))),
                    compose(X.x(jj, U(i)), X.tok(X.dual(bb), U(i))),
                )
        return main + corr

    out.append(
        _rule(
            "dotslide-left",
            pat([U(I), U(J)], [(0, xbox(U(I), N)), (0, s_box(I, J))]),
            dotslide_left_to_right,
            prov + ", dot slide",
            "s(x^n⊗1) = (1⊗x^n)s + δ Σ_j Σ_b β_b x^{n-1-j} ⊗ x^j β_b̌",
        )
    )
    return out


def _braid_rhs(b):
    i, j, l = b["i"], b["j"], b["l"]
    # input colors (i, j, l) -> output (l, j, i)
    return compose_all(
        tensor(from_box(s_box(j, l)), identity((U(i),))),
        tensor(identity((U(j),)), from_box(s_box(i, l))),
        tensor(from_box(s_box(i, j)), identity((U(l),))),
    )


def adjunction_rules(X: _Ctx, left: bool) -> list[RewriteRule]:
    out = [
        _rule(
            "zigzag-up",
            pat([U(I)], [(1, c_box(I)), (0, d_box(I))]),
            lambda b: identity((U(b["i"]),)),
            "defining relation: right adjunction",
            "(d⊗1)(1⊗c) = 1",
        ),
        _rule(
            "zigzag-down",
            pat([D(I)], [(0, c_box(I)), (1, d_box(I))]),
            lambda b: identity((D(b["i"]),)),
            "defining relation: right adjunction",
            "(1⊗d)(c⊗1) = 1",
        ),
    ]
    if left:
        out += [
            _rule(
                "zigzag-left-down",
                pat([D(I)], [(1, cp_box(I)), (0, dp_box(I))]),
                lambda b: identity((D(b["i"]),)),
                "derived: left adjunction of the alternate presentation",
                "(d'⊗1)(1⊗c') = 1",
            ),
            _rule(
                "zigzag-left-up",
                pat([U(I)], [(0, cp_box(I)), (1, dp_box(I))]),
                lambda b: identity((U(b["i"]),)),
                "derived: left adjunction of the alternate presentation",
                "(1⊗d')(c'⊗1) = 1",
            ),
        ]
    return out


def flow_rules(X: _Ctx) -> list[RewriteRule]:
    """Pivotality: tokens move toward strand starts, dots toward strand ends."""
    prov = "derived: dots and tokens rotate through cups and caps"
    out = []
    # right cup c: out-leg right (+), in-leg left (-)
    out.append(
        _rule(
            "token-through-c",
            pat([], [(0, c_box(I)), (1, token_box(U(I), A))]),
            lambda b: compose(tensor(X.tok(b["a"], D(b["i"])), identity((U(b["i"]),))), from_box(c_box(b["i"]))),
            prov,
            "(1⊗β)c = (β⁻⊗1)c",
            [_not_base(0)],
            "cup is not the base of a closed loop",
        )
    )
    out.append(
        _rule(
            "dot-through-c",
            pat([], [(0, c_box(I)), (0, xbox(D(I), N))]),
            lambda b: compose(tensor(identity((D(b["i"]),)), X.x(b["n"], U(b["i"]))), from_box(c_box(b["i"]))),
            prov,
            "(x⁻⊗1)c = (1⊗x)c",
            [_not_base(0)],
            "cup is not the base of a closed loop",
        )
    )
    out.append(
        _rule(
            "token-through-d",
            pat([U(I), D(I)], [(1, token_box(D(I), A)), (0, d_box(I))]),
            lambda b: compose(from_box(d_box(b["i"])), tensor(X.tok(b["a"], U(b["i"])), identity((D(b["i"]),)))),
            prov,
            "d(1⊗β⁻) = d(β⊗1)",
        )
    )
    out.append(
        _rule(
            "dot-through-d",
            pat([U(I), D(I)], [(0, xbox(U(I), N)), (0, d_box(I))]),
            lambda b: compose(from_box(d_box(b["i"])), tensor(identity((U(b["i"]),)), X.x(b["n"], D(b["i"])))),
            prov,
            "d(x⊗1) = d(1⊗x⁻)",
        )
    )
    # left cup c': out-leg left (+), in-leg right (-)
    out.append(
        _rule(
            "token-through-c'",
            pat([], [(0, cp_box(I)), (0, token_box(U(I), A))]),
            lambda b: compose(tensor(identity((U(b["i"]),)), X.tok(b["a"], D(b["i"]))), from_box(cp_box(b["i"]))),
            prov,
            "(β⊗1)c' = (1⊗β⁻)c'",
            [_not_base(0)],
            "cup is not the base of a closed loop",
        )
    )
    out.append(
        _rule(
            "dot-through-c'",
            pat([], [(0, cp_box(I)), (1, xbox(D(I), N))]),
            lambda b: compose(tensor(X.x(b["n"], U(b["i"])), identity((D(b["i"]),))), from_box(cp_box(b["i"]))),
            prov,
            "(1⊗x⁻)c' = (x⊗1)c'",
            [_not_base(0)],
            "cup is not the base of a closed loop",
        )
    )
    out.append(
        _rule(
            "token-through-d'",
            pat([D(I), U(I)], [(0, token_box(D(I), A)), (0, dp_box(I))]),
            lambda b: compose(from_box(dp_box(b["i"])), tensor(identity((D(b["i"]),)), X.tok(b["a"], U(b["i"])))),
            prov,
            "d'(β⁻⊗1) = d'(1⊗β)",
        )
    )
    out.append(
        _rule(
            "dot-through-d'",
            pat([D(I), U(I)], [(1, xbox(U(I), N)), (0, dp_box(I))]),
            lambda b: compose(from_box(dp_box(b["i"])), tensor(X.x(b["n"], D(b["i"])), identity((U(b["i"]),)))),
            prov,
            "d'(1⊗x) = d'(x⁻⊗1)",
        )
    )
    # tokens pass sideways crossings freely
    out.append(
        _rule(
            "token-through-t-up",
            pat([U(I), D(J)], [(0, t_box(I, J)), (1, token_box(U(I), A))]),
            lambda b: compose(from_box(t_box(b["i"], b["j"])), tensor(X.tok(b["a"], U(b["i"])), identity((D(b["j"]),)))),
            "derived: token slide rotated",
            "(1⊗β)t = t(β⊗1)",
        )
    )
    out.append(
        _rule(
            "token-through-t-down",
            pat([U(I), D(J)], [(1, token_box(D(J), A)), (0, t_box(I, J))]),
            lambda b: compose(tensor(X.tok(b["a"], D(b["j"])), identity((U(b["i"]),))), from_box(t_box(b["i"], b["j"]))),
            "derived: token slide rotated",
            "t(1⊗β⁻) = (β⁻⊗1)t",
        )
    )
    out.append(
        _rule(
            "token-through-t'-up",
            pat([D(I), U(J)], [(0, tp_box(I, J)), (0, token_box(U(J), A))]),
            lambda b: compose(from_box(tp_box(b["i"], b["j"])), tensor(identity((D(b["i"]),)), X.tok(b["a"], U(b["j"])))),
            "derived: token slide rotated",
            "(β⊗1)t' = t'(1⊗β)",
        )
    )
    out.append(
        _rule(
            "token-through-t'-down",
            pat([D(I), U(J)], [(0, token_box(D(I), A)), (0, tp_box(I, J))]),
            lambda b: compose(tensor(identity((U(b["j"]),)), X.tok(b["a"], D(b["i"]))), from_box(tp_box(b["i"], b["j"]))),
            "derived: token slide rotated",
            "t'(β⁻⊗1) = (1⊗β⁻)t'",
        )
    )
    # dots pass sideways crossings with corrections
    out.append(
        _rule(
            "dot-through-t-up",
            pat([U(I), D(J)], [(0, xbox(U(I), N)), (0, t_box(I, J))]),
            lambda b: _dot_t_up(X, b),
            "derived: dot slide conjugated by the right adjunction",
            "t(x^n⊗1) = (1⊗x^n)t - δ Σ_j Σ_b (1⊗x^jβ_b̌)c · d(β_b x^{n-1-j}⊗1)",
        )
    )
    out.append(
        _rule(
            "dot-through-t-down",
            pat([U(I), D(J)], [(0, t_box(I, J)), (0, xbox(D(J), N))]),
            lambda b: _dot_t_down(X, b),
            "derived: dot slide conjugated by the right adjunction",
            "(x⁻^n⊗1)t = t(1⊗x⁻^n) + δ Σ_j Σ_b (x⁻^j⊗β_b)c · d(β_b̌⊗x⁻^{n-1-j})",
        )
    )
    out.append(
        _rule(
            "dot-through-t'-up",
            pat([D(I), U(J)], [(1, xbox(U(J), N)), (0, tp_box(I, J))]),
            lambda b: _dot_tp_up(X, b),
            "derived: dot slide conjugated by the left adjunction",
            "t'(1⊗x^n) = (x^n⊗1)t' + δ Σ_j Σ_b (x^jβ_b̌⊗1)c' · d'(1⊗β_b x^{n-1-j})",
        )
    )
    out.append(
        _rule(
            "dot-through-t'-down",
            pat([D(I), U(J)], [(0, tp_box(I, J)), (1, xbox(D(I), N))]),
            lambda b: _dot_tp_down(X, b),
            "derived: dot slide conjugated by the left adjunction",
            "(1⊗x⁻^n)t' = t'(x⁻^n⊗1) - δ Σ_j Σ_b (β_b⊗x⁻^j)c' · d'(x⁻^{n-1-j}⊗β_b̌)",
        )
    )
    return out


def _dot_t_up(X: _Ctx, b):
    i, j, n = b["i"], b["j"], b["n"]
    main = compose(tensor(identity((D(j),)), X.x(n, U(i))), from_box(t_box(i, j)))
    if not X.delta(i, j):
        return main
    corr = MorphismExpr.zero((U(i), D(j)), (D(j), U(i)))
    for bb in X.basis(i):
        for jj in range(n):
            cup = compose(tensor(identity((D(i),)), compose(X.x(jj, U(i)), X.tok(X.dual(bb), U(i)))), from_box(c_box(i)))
            cap = compose(from_box(d_box(i)), tensor(compose(X.x(n - 1 - jj, U(i)), X.tok(bb, U(i))), identity((D(i),))))
            corr = corr + compose(cup, cap)
    return main - corr


def _dot_t_down(X: _Ctx, b):
    i, j, n = b["i"], b["j"], b["n"]
    main = compose(from_box(t_box(i, j)), tensor(identity((U(i),)), X.x(n, D(j))))
    if not X.delta(i, j):
        return main
    corr = MorphismExpr.zero((U(i), D(j)), (D(j), U(i)))
    for bb in X.basis(i):
        for jj in range(n):
            cup = compose(tensor(X.x(jj, D(i)), X.tok(bb, U(i))), from_box(c_box(i)))
            cap = compose(from_box(d_box(i)), tensor(X.tok(X.dual(bb), U(i)), X.x(n - 1 - jj, D(i))))
            corr = corr + compose(cup, cap)
    return main + corr


def _dot_tp_up(X: _Ctx, b):
    i, j, n = b["i"], b["j"], b["n"]
    main = compose(tensor(X.x(n, U(j)), identity((D(i),))), from_box(tp_box(i, j)))
    if not X.delta(i, j):
        return main
    corr = MorphismExpr.zero((D(i), U(j)), (U(j), D(i)))
    for bb in X.basis(i):
        for jj in range(n):
            cup = compose(tensor(compose(X.x(jj, U(i)), X.tok(X.dual(bb), U(i))), identity((D(i),))), from_box(cp_box(i)))
            cap = compose(from_box(dp_box(i)), tensor(identity((D(i),)), compose(X.x(n - 1 - jj, U(i)), X.tok(bb, U(i)))))
            corr = corr + compose(cup, cap)
    return main + corr


def _dot_tp_down(X: _Ctx, b):
    i, j, n = b["i"], b["j"], b["n"]
    main = compose(from_box(tp_box(i, j)), tensor(X.x(n, D(i)), identity((U(j),))))
    if not X.delta(i, j):
        return main
    corr = MorphismExpr.zero((D(i), U(j)), (U(j), D(i)))
    for bb in X.basis(i):
        for jj in range(n):
            cup = compose(tensor(X.tok(bb, U(i)), X.x(jj, D(i))), from_box(cp_box(i)))
            cap = compose(from_box(dp_box(i)), tensor(X.x(n - 1 - jj, D(i)), X.tok(X.dual(bb), U(i))))
            corr = corr + compose(cup, cap)
    return main - corr


def crossing_rules(X: _Ctx) -> list[RewriteRule]:
    """Folding, mates, double crossings and twisted cups and caps."""
    k = X.k
    out = []
    out.append(
        _rule(
            "t-fold",
            pat([U(I), D(J)], [(0, c_box(J)), (1, s_box(J, I)), (2, d_box(J))]),
            lambda b: from_box(t_box(b["i"], b["j"])),
            "definition of the rightward crossing",
            "(1⊗1⊗d)(1⊗s⊗1)(c⊗1⊗1) = t",
        )
    )
    out.append(
        _rule(
            "t'-fold",
            pat([D(I), U(J)], [(2, cp_box(I)), (1, s_box(J, I)), (0, dp_box(I))]),
            lambda b: from_box(tp_box(b["i"], b["j"])),
            "definition of the leftward crossing in the alternate presentation",
            "(d'⊗1⊗1)(1⊗s⊗1)(1⊗1⊗c') = t'",
        )
    )
    out.append(
        _rule(
            "mate-d-s",
            pat([U(I), U(J), D(I)], [(0, s_box(I, J)), (1, d_box(I))]),
            lambda b: compose(
                tensor(from_box(d_box(b["i"])), identity((U(b["j"]),))),
                tensor(identity((U(b["i"]),)), from_box(t_box(b["j"], b["i"]))),
            ),
            "derived: definition of t and the right adjunction",
            "(1⊗d)(s⊗1) = (d⊗1)(1⊗t)",
        )
    )
    out.append(
        _rule(
            "mate-s-c",
            pat([U(J)], [(0, c_box(I)), (1, s_box(I, J))]),
            lambda b: compose(
                tensor(from_box(t_box(b["j"], b["i"])), identity((U(b["i"]),))),
                tensor(identity((U(b["j"]),)), from_box(c_box(b["i"]))),
            ),
            "derived: definition of t and the right adjunction",
            "(1⊗s)(c⊗1) = (t⊗1)(1⊗c)",
        )
    )
    out.append(
        _rule(
            "mate-d'-s",
            pat([D(I), U(J), U(I)], [(1, s_box(J, I)), (0, dp_box(I))]),
            lambda b: compose(
                tensor(identity((U(b["j"]),)), from_box(dp_box(b["i"]))),
                tensor(from_box(tp_box(b["i"], b["j"])), identity((U(b["i"]),))),
            ),
            "derived: definition of t' and the left adjunction",
            "(d'⊗1)(1⊗s) = (1⊗d')(t'⊗1)",
        )
    )
    out.append(
        _rule(
            "mate-s-c'",
            pat([U(J)], [(1, cp_box(I)), (0, s_box(J, I))]),
            lambda b: compose(
                tensor(identity((U(b["i"]),)), from_box(tp_box(b["i"], b["j"]))),
                tensor(from_box(cp_box(b["i"])), identity((U(b["j"]),))),
            ),
            "derived: definition of t' and the left adjunction",
            "(s⊗1)(1⊗c') = (1⊗t')(c'⊗1)",
        )
    )

    out.append(
        _rule(
            "doublecross-down",
            pat(
                [D(I), D(J)],
                [(0, c_box(I)), (2, c_box(J)), (1, t_box(I, J)), (3, t_box(J, I)), (2, d_box(I)), (2, d_box(J))],
            ),
            lambda b: identity((D(b["i"]), D(b["j"]))),
            "derived: mate of the upward double crossing",
            "two downward crossings, each a t bent by a cup and a cap, cancel",
        )
    )

    def dc_up_down(b):
        i, j = b["i"], b["j"]
        w = (U(i), D(j))
        out_ = identity(w)
        if not X.delta(i, j):
            return out_
        for r in range(0, max(k, 0)):
            for s in range(0, k - r):
                for a in X.basis(i):
                    for bb in X.basis(i):
                        f = X.dual(a) * X.el(bb)
                        if f.is_zero():
                            continue
                        top = compose(tensor(X.tok(a, U(i)), X.x(s, D(i))), from_box(cp_box(i)))
                        mid = X.bub(CCW, -r - s - 2, f, _col(X, i), "right", ())
                        bot = compose(
                            from_box(d_box(i)),
                            tensor(compose(X.x(r, U(i)), X.tok(X.dual(bb), U(i))), identity((D(i),))),
                        )
                        out_ = out_ + compose_all(top, mid, bot)
        return out_

    out.append(
        _rule(
            "doublecross-up-down",
            pat([U(I), D(J)], [(0, t_box(I, J)), (0, tp_box(J, I))]),
            dc_up_down,
            "inversion relation in the alternate presentation",
            "t't = 1 + δ Σ_{r,s≥0} Σ_{a,b} (β_a⊗x⁻^s)c' · ccw(-r-s-2, ǎb) · d(x^rβ_b̌⊗1)",
        )
    )

    def dc_down_up(b):
        i, j = b["i"], b["j"]
        w = (D(i), U(j))
        out_ = identity(w)
        if not X.delta(i, j):
            return out_
        for r in range(0, max(-k, 0)):
            for s in range(0, -k - r):
                for a in X.basis(i):
                    for bb in X.basis(i):
                        f = X.dual(a) * X.el(bb)
                        if f.is_zero():
                            continue
                        top = compose(
                            tensor(identity((D(i),)), compose(X.x(r, U(i)), X.tok(X.dual(bb), U(i)))),
                            from_box(c_box(i)),
                        )
                        mid = X.bub(CW, -r - s - 2, f, _col(X, i), "right", ())
                        bot = compose(from_box(dp_box(i)), tensor(X.tok(a, D(i)), X.x(s, U(i))))
                        out_ = out_ + compose_all(top, mid, bot)
        return out_

    out.append(
        _rule(
            "doublecross-down-up",
            pat([D(I), U(J)], [(0, tp_box(I, J)), (0, t_box(J, I))]),
            dc_down_up,
            "inversion relation in the alternate presentation",
            "tt' = 1 + δ Σ_{r,s≥0} Σ_{a,b} (1⊗x^rβ_b̌)c · cw(-r-s-2, ǎb) · d'(β⁻_a⊗x^s)",
        )
    )

    # twisted cups and caps: curls after moving the crossing onto the turn
    def right_curl_terms(i):
        """[(coef-free strand morphism, bubble expr)] for the undotted right curl."""
        terms = []
        for s in range(0, max(-k, 0) + 1):
            for bb in X.basis(i):
                terms.append((s, bb, X.dual(bb)))
        return terms

    def t_cp(b):
        i = b["i"]
        res = MorphismExpr.zero((), (D(i), U(i)))
        for s, bb, bchk in right_curl_terms(i):
            strand = compose(X.tok(bb, U(i)), X.x(s, U(i)))
            cup = compose(tensor(identity((D(i),)), strand), from_box(c_box(i)))
            res = res - compose(X.bub(CW, -s - 1, bchk, _col(X, i), "right", (D(i), U(i))), cup)
        return res

    out.append(
        _rule(
            "twisted-c'",
            pat([], [(0, cp_box(I)), (0, t_box(I, I))]),
            t_cp,
            "derived: right curl relation moved onto a cup",
            "t c' = -Σ_{s≥0} Σ_b (1⊗β_b x^s)c · cw(-s-1, b̌)",
        )
    )

    def d_tp(b):
        i = b["i"]
        res = MorphismExpr.zero((D(i), U(i)), ())
        for s, bb, bchk in right_curl_terms(i):
            strand = compose(X.tok(bb, U(i)), X.x(s, U(i)))
            cap = compose(from_box(dp_box(i)), tensor(identity((D(i),)), strand))
            res = res - compose(cap, X.bub(CW, -s - 1, bchk, _col(X, i), "right", (D(i), U(i))))
        return res

    out.append(
        _rule(
            "twisted-d",
            pat([D(I), U(I)], [(0, tp_box(I, I)), (0, d_box(I))]),
            d_tp,
            "derived: right curl relation moved onto a cap",
            "d t' = -Σ_{s≥0} Σ_b d'(1⊗β_b x^s) · cw(-s-1, b̌)",
        )
    )

    def left_curl_terms(i):
        terms = []
        for s in range(0, max(k, 0) + 1):
            for bb in X.basis(i):
                terms.append((s, bb))
        return terms

    def dp_t(b):
        i = b["i"]
        res = MorphismExpr.zero((U(i), D(i)), ())
        for s, bb in left_curl_terms(i):
            strand = compose(X.x(s, U(i)), X.tok(X.dual(bb), U(i)))
            cap = compose(from_box(d_box(i)), tensor(strand, identity((D(i),))))
            res = res + compose(cap, X.bub(CCW, -s - 1, X.el(bb), _col(X, i), "left", (U(i), D(i))))
        return res

    out.append(
        _rule(
            "twisted-d'",
            pat([U(I), D(I)], [(0, t_box(I, I)), (0, dp_box(I))]),
            dp_t,
            "derived: left curl relation moved onto a cap",
            "d' t = Σ_{s≥0} Σ_b ccw(-s-1, b) · d(x^s β_b̌⊗1)",
        )
    )

    def tp_c(b):
        i = b["i"]
        res = MorphismExpr.zero((), (U(i), D(i)))
        for s, bb in left_curl_terms(i):
            strand = compose(X.x(s, U(i)), X.tok(X.dual(bb), U(i)))
            cup = compose(tensor(strand, identity((D(i),))), from_box(cp_box(i)))
            res = res + compose(X.bub(CCW, -s - 1, X.el(bb), _col(X, i), "left", (U(i), D(i))), cup)
        return res

    out.append(
        _rule(
            "twisted-c",
            pat([], [(0, c_box(I)), (0, tp_box(I, I))]),
            tp_c,
            "derived: left curl relation moved onto a cup",
            "t' c = Σ_{s≥0} Σ_b ccw(-s-1, b) · (x^s β_b̌⊗1)c'",
        )
    )
    return out


def _col(X: _Ctx, i):
    return i if X.colored else None


def decorated_rules(X: _Ctx) -> list[RewriteRule]:
    """Rewrite the decorated cups (k > 0) and caps (k < 0) into c' and d' forms."""
    k = X.k
    out = []
    if k > 0:

        def sqcup_rhs(b):
            r, bb, i = b["r"], b["b"], b["i"]
            res = MorphismExpr.zero((), (U(i), D(i)))
            for s in range(0, k - r):
                for a in X.basis(i):
                    f = X.dual(a) * X.el(bb)
                    if f.is_zero():
                        continue
                    cup = compose(tensor(X.tok(a, U(i)), X.x(s, D(i))), from_box(cp_box(i)))
                    res = res - compose(X.bub(CCW, -r - s - 2, f, _col(X, i), "right", (U(i), D(i))), cup)
            return res

        out.append(
            _rule(
                "decorated-cup",
                pat([], [(0, Box("sqcup", (), (U(I), D(I)), (R, B)))]),
                sqcup_rhs,
                "derived: inversion relation compared with the alternate presentation",
                "sq(r,b) = -Σ_{s≥0} Σ_a (β_a⊗x⁻^s)c' · ccw(-r-s-2, ǎb)",
            )
        )
    if k < 0:

        def sqcap_rhs(b):
            r, bb, i = b["r"], b["b"], b["i"]
            res = MorphismExpr.zero((D(i), U(i)), ())
            for s in range(0, -k - r):
                for a in X.basis(i):
                    f = X.dual(a) * X.el(bb)
                    if f.is_zero():
                        continue
                    cap = compose(from_box(dp_box(i)), tensor(X.tok(a, D(i)), X.x(s, U(i))))
                    res = res - compose(cap, X.bub(CW, -r - s - 2, f, _col(X, i), "right", (D(i), U(i))))
            return res

        out.append(
            _rule(
                "decorated-cap",
                pat([D(I), U(I)], [(0, Box("sqcap", (D(I), U(I)), (), (R, B)))]),
                sqcap_rhs,
                "derived: inversion relation compared with the alternate presentation",
                "sqcap(r,b) = -Σ_{s≥0} Σ_a cw(-r-s-2, ǎb) · d'(β⁻_a⊗x^s)",
            )
        )
    return out


# ---------------------------------------------------------------------------
# procedural rules: loops and bubbles


def _loop_closure(X: _Ctx):
    def matcher(term: DiagramTerm, w: Wiring, idx: int, rs) -> list | None:
        box = term.boxes[idx][1]
        if box.kind not in ("c", "cp"):
            return None
        for st in strands(term, w):
            if not st.closed or st.base != idx:
                continue
            kinds = [term.boxes[j][1].kind for j in st.visits]
            turns = [kd for kd in kinds if kd not in ("x", "tok")]
            if sorted(turns) == ["c", "dp"]:
                orient = CCW
            elif sorted(turns) == ["cp", "d"]:
                orient = CW
            else:
                return None
            mapping = {n: j for n, j in enumerate(sorted(set(st.visits)))}
            g = _gather(term, mapping)
            if g is None:
                return None
            W, lo, hi = g
            ndots = 0
            tok = None
            for j in st.visits:
                bx = term.boxes[j][1]
                if bx.kind == "x":
                    ndots += bx.params[0]
                elif bx.kind == "tok":
                    e = X.el(bx.params[0])
                    tok = e if tok is None else e * tok
            color = box.color if X.colored else None
            if tok is None:
                tok = X.F.one if color is None else X.F.idempotent(color)
            if tok.is_zero():
                return []
            origin = W[lo][0]
            sym = BubbleSymbol(orient, ndots, tok, color, X.k)
            poly = bubble_value(sym)
            prefix = [(o, bx) for o, bx, _ in W[:lo]]
            suffix = [(o, bx) for o, bx, _ in W[hi + 1 :]]
            res = []
            for mono, coef in poly.terms.items():
                mid = [(origin, bubble_box(s)) for s in mono]
                res.append((coef, DiagramTerm(term.dom, prefix + mid + suffix, term.bubbles)))
            return res
        return None

    return RewriteRule(
        name="close-loop",
        pattern=None,
        replacement=None,
        provenance="circle evaluations and bubble definitions",
        replacement_text="simple closed loop -> bubble (evaluated when below threshold)",
        matcher=matcher,
        anchor_kinds=("c", "cp"),
    )


def _bubble_extract(X: _Ctx):
    """Move a bubble box within its region; pull it out once it is rightmost.

    The box is moved by interchange up and down the stack.  In colored rule
    sets it also hops right across strands of another color.
    """

    F = X.F

    def token_color(sym):
        if sym.color is not None or not F.partitioned:
            return sym.color
        cols = {F.color_of(b) for b, _ in sym.token.support()}
        return cols.pop() if len(cols) == 1 else None

    def rightmost(boxes, dom, idx, color) -> bool:
        w = list(dom)
        for off, bx in boxes[:idx]:
            w[off : off + len(bx.dom)] = bx.cod
        off = boxes[idx][0]
        right = w[off:]
        if not right:
            return True
        if X.colored:
            return all(l.color is not None and l.color != color for l in right)
        if color is None:
            return False
        # uncolored over a partitioned algebra: hop strands that carry a
        # token of another block, where every slide correction vanishes
        tmp = DiagramTerm(dom, boxes, canonical=True)
        owner, visits = segment_strands(tmp)
        current = [("d", p) for p in range(len(dom))]
        for i, (o, bx) in enumerate(boxes[:idx]):
            current[o : o + len(bx.dom)] = [(i, q) for q in range(len(bx.cod))]
        for seg in current[off:]:
            cols = {
                F.color_of(tmp.boxes[j][1].params[0])
                for j in visits[owner[seg]]
                if tmp.boxes[j][1].kind == "tok"
            }
            if not cols - {color}:
                return False
        return True

    def matcher(term: DiagramTerm, w: Wiring, idx: int, rs) -> list | None:
        sym = term.boxes[idx][1].params[0]
        color = token_color(sym)
        for step in (1, -1):
            boxes = list(term.boxes)
            pos = idx
            while True:
                if rightmost(boxes, term.dom, pos, color):
                    rest = boxes[:pos] + boxes[pos + 1 :]
                    return [(Fraction(1), DiagramTerm(term.dom, rest, term.bubbles + (sym,)))]
                nxt = pos + step
                if nxt < 0 or nxt >= len(boxes):
                    break
                lo, hi = (pos, nxt) if step > 0 else (nxt, pos)
                sw = commute(boxes[lo], boxes[hi])
                if sw is None:
                    break
                boxes[lo], boxes[hi] = sw
                pos = nxt
        return None

    return RewriteRule(
        name="bubble-to-right",
        pattern=None,
        replacement=None,
        provenance="bubbles in the right region commute; bubble slides across strands of another color",
        replacement_text="bubble in the right region -> scalar factor",
        matcher=matcher,
        anchor_kinds=("bub",),
    )


# ---------------------------------------------------------------------------
# assembly


def build_rules(F: FrobeniusAlgebra, k: int, *, colored: bool, alternate: bool, name: str) -> RuleSet:
    """Rule set for one presentation.

    ``alternate`` selects the presentation with ``c'`` and ``d'`` as
    generators; otherwise decorated cups and caps are present and rewritten.
    Both variants carry the full shared rule family.
    """
    X = _Ctx(F, k, colored)
    rules: list[RewriteRule] = []
    rules += decorated_rules(X) if not alternate else []
    rules += adjunction_rules(X, left=True)
    rules += crossing_rules(X)
    rules.append(_loop_closure(X))
    rules += flow_rules(X)
    rules += wreath_rules(X)
    rules.append(_bubble_extract(X))
    return RuleSet(name, rules, F, k, colored)
