"""Budgeted searches at q=2: independence number, chromatic bounds, and a
random search for large EKR sets outside the extremal families.

Run: python3 demos/04_search.py [seconds]
"""
import sys
from fractions import Fraction

from qkneser.families import LINE_PLANE, LINE_SOLID
from qkneser.geometry import projective_space, rref_canonicalize
from qkneser.kneser import build_graph
from qkneser.search import (
    HeavySolidInstance,
    SearchBudget,
    chromatic_bounds,
    hm_falsifier,
    independence_number,
    lemma41_hypothesis_check,
)

secs = float(sys.argv[1]) if len(sys.argv) > 1 else 10.0

for om in (LINE_SOLID, LINE_PLANE):
    g = build_graph(5, om, 2)
    a = independence_number(g, SearchBudget(max_nodes=10**7, max_seconds=secs))
    print(f"{om}: alpha in [{a.lower}, {a.upper}]  lower from {a.lower_source}, {a.nodes_expanded} nodes")
    c = chromatic_bounds(g, alpha_upper=a.upper, run_dsatur=True)
    print(f"{om}: chi in [{c.lower}, {c.upper}]")
    for cert in c.certificates:
        print("     ", {k: v for k, v in cert.items() if k != "witness"})
    f = hm_falsifier(g, SearchBudget(seed=1), restarts=5000)
    print(f"{om}: best EKR set outside the extremal families: {f.best_size} (bound {f.e1}), "
          f"{f.discarded} extremal candidates discarded, {f.seconds:.1f}s")

# The heavy-solid lemma needs q beyond any desk-scale field
sp = projective_space(5, 3)
pts = lambda *rows: [rref_canonicalize([r], 3) for r in rows]
P1, P2, P3 = pts([1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0])
M = tuple(Q for Q in sp.points if not Q <= P1 + P2 + P3)[:40]
r = lemma41_hypothesis_check(HeavySolidInstance(M, P1, P2, P3, m=5, n=9, d=Fraction(1, 4)))
print(f"heavy solid: needs q > {r['threshold']:.3g}; heaviest solid on the plane holds {r['heaviest_solid_count']} points")
