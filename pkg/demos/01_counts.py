"""Counting subspaces and flags of GF(q)^5.

Run: python3 demos/01_counts.py
"""
from qkneser.geometry import count_flags, enumerate_subspaces, gaussian, theta
from qkneser.families import e0_23, e0_24, e1_23, e1_24, lemma51_identity

# Gaussian coefficients against explicit enumeration
for q in (2, 3):
    row = [gaussian(5, k, q) for k in range(6)]
    enum = [len(enumerate_subspaces(5, k, q)) for k in range(6)]
    print(f"q={q}  [5 k] = {row}  enumerated: {enum}")

# The two flag types of interest have the same number of flags
for q in (2, 3, 4, 5):
    print(f"q={q}  |{{2,3}}-flags| = {count_flags(5, (2, 3), q):>8}  |{{2,4}}-flags| = {count_flags(5, (2, 4), q):>8}")

# Sizes of the largest and second largest EKR sets
print()
print(" q    e0{2,4}   e1{2,4}   e0{2,3}   e1{2,3}")
for q in (2, 3, 4, 5, 7):
    print(f"{q:2d} {e0_24(q):9d} {e1_24(q):9d} {e0_23(q):9d} {e1_23(q):9d}")

# Counting line-plane flags two ways
for q in range(2, 9):
    r = lemma51_identity(q)
    print(f"q={q}: {r['lhs']} == {r['rhs']}  {r['equal']}")

# theta_3 - q classes suffice for {2,3}; theta_3 for {2,4}
for q in (2, 3, 4):
    print(f"q={q}: theta_3 = {theta(3, q)}, theta_3 - q = {theta(3, q) - q}")
