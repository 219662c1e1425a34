"""Explicit q-Kneser graphs on flags, stored as dense bitset rows."""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import (
    EnumerationLimitExceeded,
    Flag,
    FlagType,
    ProjectiveSpace,
    count_flags,
    projective_space,
    rref_canonicalize,
    theta,
    transform,
)

__all__ = [
    "BadVertexId",
    "GRAPH_VERTEX_LIMIT",
    "BitGraph",
    "KneserGraph",
    "build_graph",
    "export_dimacs",
    "dimacs_text",
    "read_dimacs",
    "export_json_meta",
    "is_independent",
    "independent_witness",
    "random_invertible_matrix",
    "automorphism_failures",
]

# dense rows cost N^2/8 bytes; 40k vertices is about 200 MB
GRAPH_VERTEX_LIMIT = 40_000


class BadVertexId(IndexError):
    pass


class BitGraph:
    """Simple undirected graph with one packed bit row per vertex.

    Bit ``j`` of row ``i`` (little bit order) is set iff ``i ~ j``.
    """

    def __init__(self, packed: np.ndarray, num_vertices: int):
        self.packed = packed
        self.num_vertices = int(num_vertices)

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[Tuple[int, int]]) -> "BitGraph":
        adj = np.zeros((num_vertices, num_vertices), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop")
            adj[i, j] = adj[j, i] = True
        return cls(np.packbits(adj, axis=1, bitorder="little"), num_vertices)

    @cached_property
    def rows(self) -> List[int]:
        return [int.from_bytes(r.tobytes(), "little") for r in self.packed]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.packed).sum(axis=1).astype(np.int64)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def degree_histogram(self) -> Dict[int, int]:
        vals, counts = np.unique(self.degrees, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def is_regular(self) -> bool:
        return len(self.degree_histogram()) <= 1

    def adjacent(self, i: int, j: int) -> bool:
        return bool((self.packed[i, j >> 3] >> (j & 7)) & 1)

    def neighbors(self, i: int) -> np.ndarray:
        bits = np.unpackbits(self.packed[i], bitorder="little", count=self.num_vertices)
        return np.flatnonzero(bits)

    def dense(self) -> np.ndarray:
        return np.unpackbits(self.packed, axis=1, bitorder="little", count=self.num_vertices).astype(bool)

    def _check_ids(self, ids) -> List[int]:
        ids = [int(v) for v in ids]
        for v in ids:
            if not 0 <= v < self.num_vertices:
                raise BadVertexId(f"vertex {v} not in 0..{self.num_vertices - 1}")
        return ids

    def mask(self, ids) -> int:
        m = 0
        for v in self._check_ids(ids):
            m |= 1 << v
        return m


class KneserGraph(BitGraph):
    """qK_{n;omega}: flags of type omega, adjacent when in general position."""

    def __init__(self, space: ProjectiveSpace, omega: FlagType, packed: np.ndarray):
        super().__init__(packed, packed.shape[0])
        self.space = space
        self.omega = omega

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def q(self) -> int:
        return self.space.q

    @property
    def vertices(self) -> List[Flag]:
        return self.space.flags(self.omega)

    @property
    def flag_ids(self) -> np.ndarray:
        return self.space.flag_ids(self.omega)

    def key(self) -> dict:
        return {"n": self.n, "q": self.q, "omega": list(self.omega.omega)}

    def __repr__(self):
        return f"KneserGraph(n={self.n}, q={self.q}, omega={list(self.omega.omega)}, N={self.num_vertices})"


def _ok_table(space: ProjectiveSpace, a: int, b: int) -> np.ndarray:
    """[a-space, b-space] -> meet trivially or span everything."""
    n, q = space.n, space.q
    counts = space.incidence(a).astype(np.float32) @ space.incidence(b).astype(np.float32).T
    ok = counts == 0
    if a + b > n:
        ok |= counts == theta(a + b - n - 1, q)
    return ok


def build_graph(
    n: int,
    omega,
    q: int,
    threads: Optional[int] = None,
    space: Optional[ProjectiveSpace] = None,
    block: int = 256,
) -> KneserGraph:
    """Build qK_{n;omega} over GF(q).

    Rows are computed in independent blocks; the result does not depend on
    ``threads``.
    """
    omega = omega if isinstance(omega, FlagType) else FlagType(omega)
    omega.validate(n)
    space = space or projective_space(n, q)
    if (space.n, space.q) != (n, q):
        raise ValueError(f"{space} does not match n={n}, q={q}")
    count = count_flags(n, omega, q)
    if count > GRAPH_VERTEX_LIMIT:
        raise EnumerationLimitExceeded(f"{count} vertices exceeds the dense-graph limit {GRAPH_VERTEX_LIMIT}")
    ids = space.flag_ids(omega)
    N = len(ids)
    om = omega.omega
    ok = {(a, b): _ok_table(space, a, b) for a in om for b in om}
    pairs = [(pa, pb, ok[(a, b)]) for pa, a in enumerate(om) for pb, b in enumerate(om)]
    packed = np.zeros((N, (N + 7) // 8), dtype=np.uint8)

    def fill(start: int) -> None:
        stop = min(start + block, N)
        adj = np.ones((stop - start, N), dtype=bool)
        for pa, pb, table in pairs:
            adj &= table[ids[start:stop, pa]][:, ids[:, pb]]
        adj[np.arange(stop - start), np.arange(start, stop)] = False
        packed[start:stop] = np.packbits(adj, axis=1, bitorder="little")

    starts = range(0, N, block)
    threads = threads or os.cpu_count() or 1
    if threads <= 1:
        for s in starts:
            fill(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, starts))
    packed.setflags(write=False)
    return KneserGraph(space, omega, packed)


def dimacs_text(g: BitGraph) -> str:
    buf = io.StringIO()
    buf.write(f"p edge {g.num_vertices} {g.edge_count}\n")
    for i in range(g.num_vertices):
        nb = g.neighbors(i)
        nb = nb[nb > i]
        if len(nb):
            buf.write("".join(f"e {i + 1} {j + 1}\n" for j in nb.tolist()))
    return buf.getvalue()


def export_dimacs(g: BitGraph, path: Union[str, os.PathLike]) -> None:
    """Write DIMACS 'p edge N M' with 1-based vertices in canonical order."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"p edge {g.num_vertices} {g.edge_count}\n")
        for i in range(g.num_vertices):
            nb = g.neighbors(i)
            nb = nb[nb > i]
            if len(nb):
                fh.write("".join(f"e {i + 1} {j + 1}\n" for j in nb.tolist()))


def read_dimacs(path) -> BitGraph:
    n_declared = m_declared = None
    edges = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                n_declared, m_declared = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
    if n_declared is None:
        raise ValueError(f"{path}: missing 'p edge' header")
    if m_declared != len(edges):
        raise ValueError(f"{path}: header says {m_declared} edges, found {len(edges)}")
    return BitGraph.from_edges(n_declared, edges)


def export_json_meta(g: KneserGraph) -> dict:
    hist = g.degree_histogram()
    return {
        "n": g.n,
        "q": g.q,
        "omega": list(g.omega.omega),
        "vertices": g.num_vertices,
        "edges": g.edge_count,
        "degree": next(iter(hist)) if len(hist) == 1 else None,
        "degree_histogram": {str(k): v for k, v in hist.items()},
    }


def independent_witness(g: BitGraph, ids) -> Optional[Tuple[int, int]]:
    """An edge inside ``ids`` if there is one, else None."""
    ids = g._check_ids(ids)
    m = g.mask(ids)
    rows = g.rows
    for v in ids:
        hit = rows[v] & m
        if hit:
            u = (hit & -hit).bit_length() - 1
            return (min(u, v), max(u, v))
    return None


def is_independent(g: BitGraph, ids) -> bool:
    return independent_witness(g, ids) is None


def random_invertible_matrix(n: int, q: int, rng: np.random.Generator) -> List[List[int]]:
    while True:
        m = rng.integers(0, q, size=(n, n)).tolist()
        if rref_canonicalize(m, q, n=n).dim == n:
            return m


def automorphism_failures(g: KneserGraph, pairs: int = 10_000, seed: int = 0) -> int:
    """Count sampled pairs whose adjacency changes under a random element of GL_n(q).

    A fresh matrix is drawn every 500 pairs.
    """
    rng = np.random.default_rng(seed)
    space, verts = g.space, g.vertices
    failures = 0
    cache: Dict[int, int] = {}
    mat = None
    for t in range(pairs):
        if t % 500 == 0:
            mat = random_invertible_matrix(g.n, g.q, rng)
            cache = {}
        i, j = (int(x) for x in rng.integers(0, g.num_vertices, size=2))
        for v in (i, j):
            if v not in cache:
                cache[v] = space.flag_index(transform(verts[v], mat))
        if g.adjacent(i, j) != g.adjacent(cache[i], cache[j]):
            failures += 1
    return failures
