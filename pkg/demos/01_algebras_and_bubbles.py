"""
Frobenius algebras and bubble values
====================================

A Frobenius algebra is given by structure constants and a trace.  Closed
dotted loops ("bubbles") evaluate to scalars in a finite window of dot
counts and are free symbols above it.
"""

from pathlib import Path

from heisfrob import dual_basis, fleet, parse_algebra
from heisfrob.bubbles import CCW, CW, BubbleSymbol, bubble_value, grassmannian_check

# the test fleet: five small algebras with one idempotent per component
algebras = fleet()
F = algebras["k[x]/x2+k"]
print(F)
print("dual basis:", dual_basis(F))

# the same kind of algebra, read from the plain-text format
D = parse_algebra((Path(__file__).parent / "dual_numbers.alg").read_text(encoding="utf-8"))
print(D, "trace of x:", D.named("x").trace())

# at central charge k a clockwise loop with k-1 dots is minus the trace
k = 2
for name in ("1_1", "x_1", "1_2"):
    loop = BubbleSymbol(CW, k - 1, F.named(name), None, k)
    print(f"clockwise, {k - 1} dots, token {name}:", bubble_value(loop))

# more dots leave a genuine generator
print("clockwise, 3 dots:", bubble_value(BubbleSymbol(CW, 3, F.named("1_1"), None, k)))

# counterclockwise loops expand into polynomials in the clockwise ones
print("counterclockwise, 1 dot:", bubble_value(BubbleSymbol(CCW, 1, F.named("1_1"), None, k)))

# the two generating series are inverse to each other, degree by degree
for t in range(-2, 5):
    ok, report = grassmannian_check(F.named("1_1"), F.named("x_1"), t, k, 1)
    print(f"degree {t}: {'ok' if ok else report.diff()}")
