"""
Colored presentations and the functors between them
===================================================

When the algebra splits into components, strands can carry the idempotent
of one component.  Functors between the uncolored and colored presentations
are checked by sending every relation across and zero-checking its image.
"""

from heisfrob import build_functor, fleet, roundtrip_check, verify_functor
from heisfrob.diagram import from_box, s_box
from heisfrob.presentations import apply_functor

F = fleet()["k+k"]
k = -1

# G splits an uncolored crossing into one crossing per pair of colors
G = build_functor("G", F, k)
print("G(s) =", apply_functor(G, from_box(s_box())))

for name in ("F", "G", "A", "B"):
    report = verify_functor(build_functor(name, F, k))
    print(f"{name}: {len(report.results)} relation images, passed={report.passed}")

print("G after F is the identity:", roundtrip_check(build_functor("F", F, k), G))

# dropping the crossing between colors 1 and 2 breaks the functor
broken = G.corrupted("G-broken", lambda bx: bx.kind == "s" and bx.dom[0].color == 1 and bx.dom[1].color == 2)
for result in verify_functor(broken).failures()[:3]:
    print(result.line())
