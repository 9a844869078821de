"""
Sorting strands by color
========================

Objects of the partial idempotent completion are words of strands, each
carrying one component idempotent.  Crossings sort any word by color, and a
morphism between sorted words splits into one diagram per component.
"""

from heisfrob import PartialKaroubi, PKObject, fleet
from heisfrob.diagram import UP, tensor, token

F = fleet()["k+k+k"]
pk = PartialKaroubi(F, 1)

obj = PKObject.parse("+3 -1 +2 -1")
target, iso, inverse = pk.color_sort(obj)
print(obj, "sorts to", target)
print("inverse both ways:", pk.check_sort(obj))

# a morphism between sorted words and its blocks
src = PKObject.parse("+1 +3")
g = tensor(token(F, F.idempotent(1), UP), token(F, F.idempotent(3), UP))
print("blocks:", pk.split(g, src, src))

# hom-set membership: Zero means the idempotents absorb the morphism
one = PKObject.parse("+1")
print("e1 on (+, 1):", pk.hom_member(token(F, F.idempotent(1), UP), one, one))
print("e2 on (+, 1):", pk.hom_member(token(F, F.idempotent(2), UP), one, one))
