"""Colorings by EKR sets.

covering_24 uses theta_3 point-pencils; the three line-plane recipes use
theta_3 - q point-line families.

Run: python3 demos/03_colorings.py [q]
"""
import itertools
import sys

import numpy as np

from qkneser.families import (
    LINE_PLANE,
    LINE_SOLID,
    coloring_23_line,
    coloring_23_mixed,
    coloring_23_plane,
    covering_24,
    verify_coloring,
    verify_nu,
)
from qkneser.geometry import projective_space
from qkneser.kneser import build_graph

q = int(sys.argv[1]) if len(sys.argv) > 1 else 2
sp = projective_space(5, q)
g23 = build_graph(5, LINE_PLANE, q)
g24 = build_graph(5, LINE_SOLID, q)

S = 0
l = int(np.flatnonzero(sp.containment(2, 4)[:, S])[0])
t = int(np.flatnonzero(sp.containment(3, 4)[:, S])[0])


def show(name, g, col):
    rep = verify_coloring(g, col)
    print(f"{name:22s} {rep.num_classes:3d} classes  cover={rep.cover_ok}  independent={rep.all_independent}"
          f"  sizes={rep.class_size_histogram}")


show("covering_24", g24, covering_24(S, sp))

col = coloring_23_line(S, l, space=sp)
show("line-based", g23, col)
print("   nu ok:", verify_nu(sp, S, col.meta["W"], col.meta["nu"])["ok"], " W =", col.meta["W"])

col = coloring_23_plane(S, t, space=sp)
show("plane-based", g23, col)
print("   W =", col.meta["W"], " ell0 =", col.meta["ell0"])

planes = np.flatnonzero(sp.containment(2, 3)[l] & sp.containment(3, 4)[:, S]).tolist()
for k in range(len(planes) + 1):
    for R in itertools.combinations(planes, k):
        show(f"mixed R={list(R)}", g23, coloring_23_mixed(S, l, R, space=sp))
        if q > 2:
            break

# a class removed leaves flags uncovered
col = coloring_23_line(S, l, space=sp)
col.classes.pop()
rep = verify_coloring(g23, col)
print("after removing a class: cover =", rep.cover_ok, " uncovered flags:", rep.uncovered)
