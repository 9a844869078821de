"""
The affine wreath product algebra
=================================

Upward diagrams on m strands have a normal form: dots, then tokens, then a
permutation.  Products are computed by straightening, and agree with
rewriting the stacked diagrams.
"""

import random

from heisfrob import build_presentation, compose, fleet, normalize_full
from heisfrob.awpa import awpa_crossing, awpa_dot, awpa_to_diagram, random_element

F = fleet()["k[x]/x2"]
s = awpa_crossing(F, 2, 0)
x1, x2 = awpa_dot(F, 2, 0), awpa_dot(F, 2, 1)

print("s·s =", s * s)
print("x1·s - s·x2 =", x1 * s - s * x2)

rng = random.Random(0)
a, b = (random_element(F, 2, rng, max_degree=2, n_terms=2) for _ in range(2))
print("a =", a)
print("b =", b)
print("a·b =", a * b)

# the same product by diagram rewriting
P = build_presentation("Heis", F, 0)
diff = awpa_to_diagram(a * b) - compose(awpa_to_diagram(a), awpa_to_diagram(b))
print("rewriting agrees:", normalize_full(diff, P.rules).expr.is_zero())
