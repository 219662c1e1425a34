"""The four large EKR families of line-plane flags, and point-pencils.

Run: python3 demos/02_ekr_families.py [q]
"""
import sys

import numpy as np

from qkneser.families import (
    LINE_PLANE,
    LINE_SOLID,
    dual_family,
    ekr_point_line,
    ekr_point_solid,
    ekr_solid_plane,
    ekr_solid_point,
    pencil_family,
    verify_family,
)
from qkneser.geometry import projective_space
from qkneser.kneser import build_graph

q = int(sys.argv[1]) if len(sys.argv) > 1 else 2
sp = projective_space(5, q)
g23 = build_graph(5, LINE_PLANE, q)
g24 = build_graph(5, LINE_SOLID, q)
print(g23, "degree", int(g23.degrees[0]))
print(g24, "degree", int(g24.degrees[0]))

P = 0
l = int(np.flatnonzero(sp.incidence(2)[:, P])[0])   # a line on P
S = int(np.flatnonzero(sp.incidence(4)[:, P])[0])   # a solid on P
t = int(np.flatnonzero(sp.containment(3, 4)[:, S])[0])  # a plane in S

fams = [
    ekr_point_line(P, l, sp),
    ekr_point_solid(P, S, sp),
    ekr_solid_plane(S, t, sp),
    ekr_solid_point(S, P, sp),
]
for f in fams:
    rep = verify_family(g23, f)
    print(f"{f.name:7s} size {rep.size}  special part {len(f.special)}  independent={rep.independent} maximal={rep.maximal}")

# a point-pencil of line-plane flags is independent but can be extended
rep = verify_family(g23, pencil_family(P, LINE_PLANE, sp))
print(f"pencil {{2,3}}: size {rep.size}  maximal={rep.maximal}")
rep = verify_family(g24, pencil_family(P, LINE_SOLID, sp))
print(f"pencil {{2,4}}: size {rep.size}  maximal={rep.maximal}")

# duality swaps point-line with solid-plane families
d = dual_family(sp, fams[0])
match = d.members == ekr_solid_plane(int(sp.dual_index(1)[P]), int(sp.dual_index(2)[l]), sp).members
print("dual of F(P,l) is a solid-plane family:", match)
