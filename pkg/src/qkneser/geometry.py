"""Subspaces and flags of GF(q)^n.

A subspace is stored as its reduced row echelon form, which is unique, so
two ``Subspace`` values compare equal exactly when they span the same set
of vectors.  ``ProjectiveSpace`` enumerates all subspaces of a given
dimension in a fixed order (lexicographic on the flattened RREF) and
caches the point incidences that the graph and family code vectorise over.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .gf import FieldTable, build_field

__all__ = [
    "DimensionMismatch",
    "AmbientMismatch",
    "EnumerationLimitExceeded",
    "DEFAULT_LIMIT",
    "enumeration_limit",
    "gaussian",
    "theta",
    "Subspace",
    "FlagType",
    "Flag",
    "rref_canonicalize",
    "intersect",
    "subspace_sum",
    "dual",
    "general_position",
    "transform",
    "ProjectiveSpace",
    "projective_space",
    "enumerate_subspaces",
    "enumerate_flags",
    "count_flags",
    "point_pencil",
]

DEFAULT_LIMIT = 2_000_000


class DimensionMismatch(ValueError):
    pass


class AmbientMismatch(ValueError):
    pass


class EnumerationLimitExceeded(RuntimeError):
    pass


def enumeration_limit(limit: Optional[int] = None) -> int:
    if limit is not None:
        return int(limit)
    env = os.environ.get("QKNESER_LIMIT")
    return int(env) if env else DEFAULT_LIMIT


def gaussian(a: int, b: int, q: int) -> int:
    """Number of b-dimensional subspaces of GF(q)^a (exact integer)."""
    if b < 0 or a < 0 or b > a:
        return 0
    num = den = 1
    for i in range(1, b + 1):
        num *= q ** (a - b + i) - 1
        den *= q**i - 1
    return num // den


def theta(m: int, q: int) -> int:
    """Number of points of PG(m, q)."""
    return gaussian(m + 1, 1, q)


@lru_cache(maxsize=None)
def _tables(q: int):
    f = build_field(q)
    return f.add.tolist(), f.mul.tolist(), f.inv.tolist(), f.neg.tolist()


def _rref(rows: Iterable[Sequence[int]], q: int) -> Tuple[Tuple[int, ...], ...]:
    add, mul, inv, neg = _tables(q)
    m = [list(r) for r in rows]
    if not m:
        return ()
    n = len(m[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv[m[r][c]]
        if s != 1:
            m[r] = [mul[s][x] for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                t = neg[m[i][c]]
                m[i] = [add[x][mul[t][y]] for x, y in zip(m[i], pr)]
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r])


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(q)^n in canonical (RREF) form."""

    n: int
    q: int
    rref: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rref)

    @property
    def field(self) -> FieldTable:
        return build_field(self.q)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.rref)

    @classmethod
    def zero(cls, n: int, q: int) -> "Subspace":
        return cls(n, q, ())

    @classmethod
    def full(cls, n: int, q: int) -> "Subspace":
        return cls(n, q, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def _check(self, other: "Subspace") -> None:
        if self.n != other.n or self.q != other.q:
            raise AmbientMismatch(f"GF({self.q})^{self.n} vs GF({other.q})^{other.n}")

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return subspace_sum(self, other).dim == other.dim

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and self <= other

    def vectors(self) -> List[Tuple[int, ...]]:
        """All q**dim vectors of the subspace (brute force)."""
        add, mul, _, _ = _tables(self.q)
        out = []
        for coeffs in itertools.product(range(self.q), repeat=self.dim):
            v = [0] * self.n
            for c, row in zip(coeffs, self.rref):
                if c:
                    v = [add[x][mul[c][y]] for x, y in zip(v, row)]
            out.append(tuple(v))
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "rref": [list(r) for r in self.rref]}

    @classmethod
    def from_json(cls, doc: dict) -> "Subspace":
        s = rref_canonicalize(doc["rref"], doc["q"], n=doc["n"])
        return s


def rref_canonicalize(rows: Iterable[Sequence[int]], q: int, n: Optional[int] = None) -> Subspace:
    """Canonical subspace spanned by ``rows`` over GF(q)."""
    rows = [tuple(int(x) for x in r) for r in rows]
    if n is None:
        if not rows:
            raise DimensionMismatch("cannot infer n from an empty row list")
        n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise DimensionMismatch(f"row of length {len(r)} in GF({q})^{n}")
        if any(x < 0 or x >= q for x in r):
            raise ValueError(f"entry outside GF({q}) in {r}")
    return Subspace(n, q, _rref(rows, q))


def subspace_sum(u: Subspace, w: Subspace) -> Subspace:
    u._check(w)
    return Subspace(u.n, u.q, _rref(u.rref + w.rref, u.q))


def _annihilator(u: Subspace) -> Subspace:
    n, q = u.n, u.q
    _, _, _, neg = _tables(q)
    piv = u.pivots
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, pc in enumerate(piv):
            v[pc] = neg[u.rref[r][f]]
        basis.append(v)
    return Subspace(n, q, _rref(basis, q))


def intersect(u: Subspace, w: Subspace) -> Subspace:
    u._check(w)
    return _annihilator(subspace_sum(_annihilator(u), _annihilator(w)))


@dataclass(frozen=True)
class FlagType:
    omega: Tuple[int, ...]

    def __init__(self, omega: Iterable[int]):
        object.__setattr__(self, "omega", tuple(int(x) for x in omega))
        if not self.omega:
            raise ValueError("flag type must be nonempty")
        if any(a >= b for a, b in zip(self.omega, self.omega[1:])):
            raise ValueError(f"flag type {self.omega} is not strictly increasing")

    def validate(self, n: int) -> "FlagType":
        if self.omega[0] < 1 or self.omega[-1] > n - 1:
            raise ValueError(f"flag type {self.omega} not inside 1..{n - 1}")
        return self

    def dual(self, n: int) -> "FlagType":
        return FlagType(sorted(n - i for i in self.omega))

    def __iter__(self):
        return iter(self.omega)

    def __len__(self):
        return len(self.omega)


def _as_type(omega) -> FlagType:
    return omega if isinstance(omega, FlagType) else FlagType(omega)


@dataclass(frozen=True)
class Flag:
    """Chain of nontrivial subspaces, smallest first."""

    spaces: Tuple[Subspace, ...]

    def __post_init__(self):
        sp = tuple(self.spaces)
        object.__setattr__(self, "spaces", sp)
        if not sp:
            raise ValueError("empty flag")
        n, q = sp[0].n, sp[0].q
        for s in sp:
            if (s.n, s.q) != (n, q):
                raise AmbientMismatch("flag spaces live in different ambient spaces")
            if s.dim == 0 or s.dim == n:
                raise ValueError("flag members must be nontrivial subspaces")
        for a, b in zip(sp, sp[1:]):
            if not a < b:
                raise ValueError("flag members do not form a strictly increasing chain")

    @property
    def type(self) -> FlagType:
        return FlagType(s.dim for s in self.spaces)

    @property
    def n(self) -> int:
        return self.spaces[0].n

    @property
    def q(self) -> int:
        return self.spaces[0].q

    def to_json(self) -> dict:
        return {"type": list(self.type.omega), "spaces": [s.to_json() for s in self.spaces]}

    @classmethod
    def from_json(cls, doc: dict) -> "Flag":
        f = cls(tuple(Subspace.from_json(s) for s in doc["spaces"]))
        if list(f.type.omega) != list(doc["type"]):
            raise ValueError(f"declared type {doc['type']} does not match {f.type.omega}")
        return f


def dual(x):
    """Annihilator of a subspace, or the dual flag (dimensions k -> n - k)."""
    if isinstance(x, Flag):
        return Flag(tuple(_annihilator(s) for s in reversed(x.spaces)))
    return _annihilator(x)


def general_position(f: Flag, g: Flag) -> bool:
    """True iff every member pair meets trivially or spans the whole space."""
    if (f.n, f.q) != (g.n, g.q):
        raise AmbientMismatch("flags live in different ambient spaces")
    n = f.n
    for a in f.spaces:
        for b in g.spaces:
            d = intersect(a, b).dim
            if d != 0 and a.dim + b.dim - d != n:
                return False
    return True


def transform(x, g: Sequence[Sequence[int]]):
    """Image of a subspace or flag under v -> v @ g (g invertible over GF(q))."""
    if isinstance(x, Flag):
        return Flag(tuple(transform(s, g) for s in x.spaces))
    add, mul, _, _ = _tables(x.q)
    rows = []
    for row in x.rref:
        v = [0] * x.n
        for c, grow in zip(row, g):
            if c:
                v = [add[a][mul[c][b]] for a, b in zip(v, grow)]
        rows.append(v)
    out = Subspace(x.n, x.q, _rref(rows, x.q))
    if out.dim != x.dim:
        raise ValueError("matrix is singular")
    return out


def count_flags(n: int, omega, q: int) -> int:
    omega = _as_type(omega).validate(n)
    total, prev = 1, 0
    for d in omega:
        total *= gaussian(n - prev, d - prev, q)
        prev = d
    return total


class ProjectiveSpace:
    """Cached enumeration and incidence data for the subspaces of GF(q)^n."""

    def __init__(self, n: int, q: int, limit: Optional[int] = None):
        if n < 1 or n > 7:
            raise ValueError(f"ambient dimension {n} outside 1..7")
        self.n, self.q = n, q
        self.field = build_field(q)
        self.limit = enumeration_limit(limit)
        self._subspaces: Dict[int, List[Subspace]] = {}
        self._index: Dict[int, Dict[Tuple, int]] = {}
        self._incidence: Dict[int, np.ndarray] = {}
        self._masks: Dict[int, List[int]] = {}
        self._containment: Dict[Tuple[int, int], np.ndarray] = {}
        self._flag_ids: Dict[Tuple[int, ...], np.ndarray] = {}
        self._flags: Dict[Tuple[int, ...], List[Flag]] = {}
        self._flag_index: Dict[Tuple[int, ...], Dict[Tuple[int, ...], int]] = {}

    def __repr__(self):
        return f"ProjectiveSpace(n={self.n}, q={self.q})"

    def _guard(self, count: int, what: str) -> None:
        if count > self.limit:
            raise EnumerationLimitExceeded(
                f"{what}: {count} objects exceeds limit {self.limit} (set QKNESER_LIMIT to override)"
            )

    # -- subspaces -------------------------------------------------------

    def count(self, k: int) -> int:
        return gaussian(self.n, k, self.q)

    def subspaces(self, k: int) -> List[Subspace]:
        if k not in self._subspaces:
            if not 0 <= k <= self.n:
                raise ValueError(f"dimension {k} outside 0..{self.n}")
            self._guard(self.count(k), f"{k}-subspaces of GF({self.q})^{self.n}")
            self._subspaces[k] = [Subspace(self.n, self.q, m) for m in self._rref_matrices(k)]
        return self._subspaces[k]

    def _rref_matrices(self, k: int) -> List[Tuple[Tuple[int, ...], ...]]:
        n, q = self.n, self.q
        out = []
        for piv in itertools.combinations(range(n), k):
            free = [(r, j) for r in range(k) for j in range(piv[r] + 1, n) if j not in piv]
            for vals in itertools.product(range(q), repeat=len(free)):
                m = [[0] * n for _ in range(k)]
                for r, c in enumerate(piv):
                    m[r][c] = 1
                for (r, j), v in zip(free, vals):
                    m[r][j] = v
                out.append(tuple(tuple(row) for row in m))
        out.sort(key=lambda m: tuple(x for row in m for x in row))
        return out

    @property
    def points(self) -> List[Subspace]:
        return self.subspaces(1)

    def index(self, u: Subspace) -> int:
        if (u.n, u.q) != (self.n, self.q):
            raise AmbientMismatch(f"{u} does not live in {self}")
        k = u.dim
        if k not in self._index:
            self._index[k] = {s.rref: i for i, s in enumerate(self.subspaces(k))}
        return self._index[k][u.rref]

    def _point_code_table(self) -> np.ndarray:
        n, q = self.n, self.q
        table = np.full(q**n, -1, dtype=np.int64)
        for i, p in enumerate(self.points):
            code = 0
            for x in p.rref[0]:
                code = code * q + x
            table[code] = i
        return table

    def incidence(self, k: int) -> np.ndarray:
        """Boolean matrix [k-subspace, point]: point lies in the subspace."""
        if k not in self._incidence:
            n, q = self.n, self.q
            subs = self.subspaces(k)
            npts = self.count(1)
            inc = np.zeros((len(subs), npts), dtype=bool)
            if k > 0 and subs:
                add, mul = self.field.add, self.field.mul
                # normalised coefficient vectors give every point of the span exactly once
                coeffs = np.array(
                    [c for c in itertools.product(range(q), repeat=k) if any(c) and c[next(i for i, x in enumerate(c) if x)] == 1],
                    dtype=np.int64,
                )
                rows = np.array([s.rref for s in subs], dtype=np.int64)  # (N, k, n)
                vec = np.zeros((len(subs), len(coeffs), n), dtype=np.int64)
                for r in range(k):
                    vec = add[vec, mul[coeffs[None, :, r, None], rows[:, None, r, :]]]
                codes = vec @ (q ** np.arange(n - 1, -1, -1, dtype=np.int64))
                pidx = self._point_code_table()[codes]
                inc[np.arange(len(subs))[:, None], pidx] = True
            inc.setflags(write=False)
            self._incidence[k] = inc
        return self._incidence[k]

    def point_masks(self, k: int) -> List[int]:
        """Point sets of the k-subspaces as Python int bitmasks."""
        if k not in self._masks:
            inc = self.incidence(k)
            packed = np.packbits(inc, axis=1, bitorder="little")
            self._masks[k] = [int.from_bytes(r.tobytes(), "little") for r in packed]
        return self._masks[k]

    def point_mask(self, u: Subspace) -> int:
        return self.point_masks(u.dim)[self.index(u)]

    def containment(self, a: int, b: int) -> np.ndarray:
        """Boolean matrix [a-subspace, b-subspace]: first contained in second."""
        key = (a, b)
        if key not in self._containment:
            ia = self.incidence(a).astype(np.float32)
            ib = self.incidence(b).astype(np.float32)
            m = (ia @ ib.T) == theta(a - 1, self.q)
            m.setflags(write=False)
            self._containment[key] = m
        return self._containment[key]

    def _supersets(self, a: int, b: int, idx: np.ndarray) -> List[np.ndarray]:
        if (a, b) in self._containment:
            c = self._containment[(a, b)]
            return [np.flatnonzero(c[i]) for i in idx]
        ia = self.incidence(a)
        ib = self.incidence(b).astype(np.float32)
        need = theta(a - 1, self.q)
        out = []
        for s in range(0, len(idx), 2048):
            blk = ia[idx[s : s + 2048]].astype(np.float32) @ ib.T
            out.extend(np.flatnonzero(row == need) for row in blk)
        return out

    # -- flags -------------------------------------------------------------

    def flag_ids(self, omega) -> np.ndarray:
        """Array [vertex, position] of subspace indices, in canonical flag order."""
        omega = _as_type(omega).validate(self.n).omega
        if omega not in self._flag_ids:
            self._guard(count_flags(self.n, omega, self.q), f"flags of type {list(omega)}")
            chains = np.arange(self.count(omega[0]), dtype=np.int64)[:, None]
            for prev, cur in zip(omega, omega[1:]):
                last = chains[:, -1]
                uniq, inv = np.unique(last, return_inverse=True)
                sups = self._supersets(prev, cur, uniq)
                parts = []
                for row, u in zip(chains, inv):
                    s = sups[u]
                    parts.append(np.column_stack([np.repeat(row[None, :], len(s), axis=0), s]))
                chains = np.vstack(parts) if parts else np.zeros((0, chains.shape[1] + 1), dtype=np.int64)
            chains.setflags(write=False)
            self._flag_ids[omega] = chains
        return self._flag_ids[omega]

    def flags(self, omega) -> List[Flag]:
        omega = _as_type(omega).validate(self.n).omega
        if omega not in self._flags:
            ids = self.flag_ids(omega)
            subs = [self.subspaces(d) for d in omega]
            # chains are nested by construction; skip the per-flag validation
            self._flags[omega] = [
                _flag_unchecked(tuple(subs[j][i] for j, i in enumerate(row))) for row in ids.tolist()
            ]
        return self._flags[omega]

    def flag_index(self, f: Flag) -> int:
        omega = f.type.omega
        if omega not in self._flag_index:
            self._flag_index[omega] = {tuple(r): i for i, r in enumerate(self.flag_ids(omega).tolist())}
        return self._flag_index[omega][tuple(self.index(s) for s in f.spaces)]

    def dual_index(self, k: int) -> np.ndarray:
        """Index of the annihilator of each k-subspace among the (n-k)-subspaces."""
        key = ("dual", k)
        if key not in self._containment:
            self._containment[key] = np.array(
                [self.index(_annihilator(s)) for s in self.subspaces(k)], dtype=np.int64
            )
        return self._containment[key]

    def dual_vertex_map(self, omega) -> np.ndarray:
        """Vertex id of dual(F) for every flag F of type omega."""
        omega = _as_type(omega).validate(self.n)
        ids = self.flag_ids(omega)
        dual_ids = np.column_stack([self.dual_index(d)[ids[:, j]] for j, d in reversed(list(enumerate(omega.omega)))])
        lookup = {tuple(r): i for i, r in enumerate(self.flag_ids(omega.dual(self.n)).tolist())}
        return np.array([lookup[tuple(r)] for r in dual_ids.tolist()], dtype=np.int64)

    def point_pencil_ids(self, point: int, omega) -> np.ndarray:
        omega = _as_type(omega).validate(self.n).omega
        ids = self.flag_ids(omega)
        return np.flatnonzero(self.incidence(omega[0])[ids[:, 0], point])


def _flag_unchecked(spaces: Tuple[Subspace, ...]) -> Flag:
    f = object.__new__(Flag)
    object.__setattr__(f, "spaces", spaces)
    return f


@lru_cache(maxsize=None)
def projective_space(n: int, q: int) -> ProjectiveSpace:
    """Shared ProjectiveSpace for (n, q) using the default enumeration limit."""
    return ProjectiveSpace(n, q)


def _space(n, q, limit):
    return projective_space(n, q) if limit is None else ProjectiveSpace(n, q, limit)


def enumerate_subspaces(n: int, k: int, q: int, limit: Optional[int] = None) -> List[Subspace]:
    return list(_space(n, q, limit).subspaces(k))


def enumerate_flags(n: int, omega, q: int, limit: Optional[int] = None) -> List[Flag]:
    return list(_space(n, q, limit).flags(omega))


def point_pencil(point: Subspace, omega, space: Optional[ProjectiveSpace] = None) -> List[Flag]:
    """All flags F of type omega for which F together with ``point`` is a flag.

    Since ``point`` is 1-dimensional this means it lies in the smallest member
    of F; when 1 is in omega the flag's own point must equal it.
    """
    if point.dim != 1:
        raise ValueError("base of a point-pencil must be 1-dimensional")
    space = space or projective_space(point.n, point.q)
    flags = space.flags(omega)
    return [flags[i] for i in space.point_pencil_ids(space.index(point), omega)]
