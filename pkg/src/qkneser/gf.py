"""Lookup-table arithmetic in GF(q) for the small prime powers used here.

Elements are the integers ``0..q-1``.  For ``q = p**k`` the polynomial
``a_0 + a_1 x + ... + a_{k-1} x^{k-1}`` is encoded as ``sum(a_i * p**i)``,
reduced modulo a fixed irreducible polynomial, so encodings never change
between runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "NotAPrimePower",
    "FieldTable",
    "SUPPORTED_ORDERS",
    "MODULI",
    "build_field",
    "field_axiom_check",
    "factor_prime_power",
]


class NotAPrimePower(ValueError):
    pass


# Monic irreducible polynomials, low-degree coefficient first (x^2+x+1 -> (1, 1, 1)).
MODULI = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (1, 0, 1),  # x^2 + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    25: (2, 0, 1),  # x^2 + 2
    27: (1, 2, 0, 1),  # x^3 + 2x + 1
}

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27)


def factor_prime_power(q: int) -> Tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``; raise NotAPrimePower otherwise."""
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise NotAPrimePower(f"{q!r} is not a prime power")
    q = int(q)
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise NotAPrimePower(f"{q} is not a prime power")
    return p, k


@dataclass(frozen=True, eq=False)
class FieldTable:
    q: int
    p: int
    k: int
    add: np.ndarray
    mul: np.ndarray
    inv: np.ndarray  # inv[0] is -1 (undefined)
    neg: np.ndarray
    modulus: Optional[Tuple[int, ...]] = None

    def __repr__(self) -> str:
        return f"FieldTable(q={self.q})"

    def sub(self, a: int, b: int) -> int:
        return int(self.add[a, self.neg[b]])

    def decode(self, a: int) -> Tuple[int, ...]:
        """Coefficient vector (a_0, ..., a_{k-1}) of element ``a``."""
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def encode(self, coeffs) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(coeffs))


def _poly_tables(p: int, k: int, modulus: Tuple[int, ...]):
    q = p**k
    digits = np.array([[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64)
    weights = p ** np.arange(k, dtype=np.int64)

    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights

    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            prod = [0] * (2 * k - 1)
            for i in range(k):
                for j in range(k):
                    prod[i + j] += digits[a, i] * digits[b, j]
            # reduce with x^k = -(m_0 + ... + m_{k-1} x^{k-1})
            for d in range(2 * k - 2, k - 1, -1):
                c = prod[d] % p
                if c:
                    for i in range(k):
                        prod[d - k + i] -= c * modulus[i]
                prod[d] = 0
            mul[a, b] = sum((prod[i] % p) * p**i for i in range(k))
    return add, mul


@lru_cache(maxsize=None)
def build_field(q: int) -> FieldTable:
    """Build (and cache) the lookup tables of GF(q)."""
    p, k = factor_prime_power(q)
    if q not in SUPPORTED_ORDERS:
        raise NotAPrimePower(f"GF({q}) is not in the supported set {SUPPORTED_ORDERS}")
    if k == 1:
        r = np.arange(q, dtype=np.int64)
        add = (r[:, None] + r[None, :]) % q
        mul = (r[:, None] * r[None, :]) % q
        modulus = None
    else:
        modulus = MODULI[q]
        add, mul = _poly_tables(p, k, modulus)

    inv = np.full(q, -1, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)], dtype=np.int64)
    for arr in (add, mul, inv, neg):
        arr.setflags(write=False)
    return FieldTable(q=q, p=p, k=k, add=add, mul=mul, inv=inv, neg=neg, modulus=modulus)


def field_axiom_check(f: FieldTable) -> bool:
    """Exhaustively check that ``f.add`` / ``f.mul`` define a field on 0..q-1."""
    q = f.q
    add, mul = np.asarray(f.add), np.asarray(f.mul)
    if add.shape != (q, q) or mul.shape != (q, q):
        return False
    if add.min() < 0 or add.max() >= q or mul.min() < 0 or mul.max() >= q:
        return False
    r = np.arange(q)
    if not (np.array_equal(add, add.T) and np.array_equal(mul, mul.T)):
        return False
    if not (np.array_equal(add[0], r) and np.array_equal(mul[1], r) and not mul[0].any()):
        return False
    # [a, b, c] indexing: add[add] is (a+b)+c, add[:, add] is a+(b+c)
    if not np.array_equal(add[add], add[:, add]):
        return False
    if not np.array_equal(mul[mul], mul[:, mul]):
        return False
    if not np.array_equal(mul[:, add], add[mul[:, :, None], mul[:, None, :]]):
        return False
    # inverses: each row of add is a permutation; each nonzero row of mul too
    for a in range(q):
        if len(set(add[a].tolist())) != q:
            return False
        if a and len(set(mul[a].tolist())) != q:
            return False
    return True
