"""
Rewriting string diagrams
=========================

Morphisms are linear combinations of diagrams.  A presentation turns its
relations into oriented rewrite rules; normalizing a difference decides
equality whenever the result is zero.
"""

from heisfrob import build_presentation, fleet, normalize_full, verify_presentation
from heisfrob.cli import parse_morphism

F = fleet()["k[x]/x2"]
P = build_presentation("Heis", F, 1)
print(P.ident, "over", F.name, "at k=1:", len(P.relations), "relations,", len(P.rules.rules), "rules")

# expressions use the small diagram language: * stacks, # places side by side
zigzag = parse_morphism("(d # id(+)) * (id(+) # c)", F)
print("zigzag:", normalize_full(zigzag, P.rules).expr)

# a dot slides through a crossing at the cost of a token sum
slide = parse_morphism("(x # id(+)) * s - s * (id(+) # x)", F)
res = normalize_full(slide, P.rules)
print("dot slide:", res.expr, f"({res.steps} steps)")

# at positive central charge this curl vanishes
curl = parse_morphism("(id(+) # d) * (s # id(-)) * (id(+) # c')", F)
print("right curl:", normalize_full(curl, P.rules).expr)

# every defining relation zero-checks
report = verify_presentation(P)
print(report.lines()[0])
print("all relations hold:", report.passed)
