"""Budgeted searches on bitset graphs, plus the point-set counts used for heavy solids.

All set operations use Python ints as bitsets (bit v = vertex v), which
keeps the inner loops in C.  Searches are single-process; running out of
budget is a normal outcome that shows up as ``exact=False`` in a report.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .families import (
    LINE_PLANE,
    LINE_SOLID,
    contained_in_example31,
    contained_in_point_pencil,
    coloring_23_line,
    covering_24,
    e0_23,
    e0_24,
    e1_23,
    e1_24,
    ekr_point_line,
    is_maximal,
    pencil_family,
)
from .geometry import ProjectiveSpace, Subspace, projective_space, theta
from .kneser import BitGraph, KneserGraph, independent_witness

__all__ = [
    "SearchBudget",
    "AlphaReport",
    "ChromaticReport",
    "FalsifierReport",
    "DegenerateInstance",
    "HeavySolidInstance",
    "independence_number",
    "max_independent_set",
    "seed_sets",
    "dsatur",
    "greedy_clique",
    "chromatic_bounds",
    "hm_falsifier",
    "lines_through_meeting",
    "heaviest_solid_on_plane",
    "lemma41_hypothesis_check",
]


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 1_000_000
    max_seconds: float = 60.0
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0 or self.threads <= 0:
            raise ValueError("budget limits must be positive")


class _OutOfBudget(Exception):
    pass


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


def _bits(x: int) -> List[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


# -- independence number ------------------------------------------------------------


@dataclass
class AlphaReport:
    lower: int
    upper: int
    exact: bool
    nodes_expanded: int
    seconds: float
    witness: List[int]
    lower_source: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def seed_sets(g: BitGraph) -> Dict[str, List[int]]:
    """Known large independent sets for the graphs of interest."""
    if not isinstance(g, KneserGraph) or g.n != 5:
        return {}
    om = g.omega.omega
    if om == LINE_SOLID:
        return {"point-pencil": sorted(pencil_family(0, om, g.space).members)}
    if om == LINE_PLANE:
        line = int(np.flatnonzero(g.space.incidence(2)[:, 0])[0])
        return {"F(P,l)": sorted(ekr_point_line(0, line, g.space).members)}
    return {}


def max_independent_set(
    g: BitGraph, budget: SearchBudget, lower: Sequence[int] = ()
) -> Tuple[List[int], int, bool, int]:
    """Branch and bound for a maximum independent set.

    Candidates are ordered by a greedy clique cover of the graph (a greedy
    coloring of the complement); a set can take at most one vertex per
    clique, which gives the pruning bound.  Returns
    ``(best, upper, closed, nodes)``; ``upper`` is valid even when the
    budget runs out.
    """
    N = g.num_vertices
    rows = g.rows
    full = (1 << N) - 1
    non = [full & ~rows[v] & ~(1 << v) for v in range(N)]
    best = list(lower)
    stack: List[int] = []
    nodes = 0
    deadline = time.monotonic() + budget.max_seconds

    def cover_order(P: int):
        order, bounds, k, U = [], [], 0, P
        push_v, push_k = order.append, bounds.append
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= rows[v]
                U ^= low
                push_v(v)
                push_k(k)
        return order, bounds

    def expand(P: int, top: list = None) -> None:
        nonlocal nodes, best
        order, bounds = cover_order(P)
        for i in range(len(order) - 1, -1, -1):
            if len(stack) + bounds[i] <= len(best):
                return
            if top is not None:
                top[0] = bounds[i]
            nodes += 1
            if nodes > budget.max_nodes or (nodes & 255 == 0 and time.monotonic() > deadline):
                raise _OutOfBudget
            v = order[i]
            stack.append(v)
            newP = P & non[v]
            if newP:
                expand(newP)
            elif len(stack) > len(best):
                best = list(stack)
            stack.pop()
            P &= ~(1 << v)

    top = [len(best)]
    if N == 0:
        return [], 0, True, 0
    try:
        expand(full, top)
    except _OutOfBudget:
        return sorted(best), max(len(best), top[0]), False, nodes
    return sorted(best), len(best), True, nodes


def independence_number(
    g: BitGraph, budget: Optional[SearchBudget] = None, seeds: Optional[Dict[str, Sequence[int]]] = None
) -> AlphaReport:
    """Lower bound from seed sets, upper bound (and maybe closure) from branch and bound."""
    budget = budget or SearchBudget()
    t0 = time.monotonic()
    seeds = seed_sets(g) if seeds is None else seeds
    best, src = [], "none"
    for name, ids in seeds.items():
        if independent_witness(g, ids) is None and len(ids) > len(best):
            best, src = sorted(ids), name
    found, upper, closed, nodes = max_independent_set(g, budget, best)
    if len(found) > len(best):
        best, src = found, "branch-and-bound"
    if independent_witness(g, best) is not None:
        raise AssertionError("search produced a dependent witness")
    return AlphaReport(
        lower=len(best),
        upper=max(upper, len(best)),
        exact=closed,
        nodes_expanded=nodes,
        seconds=time.monotonic() - t0,
        witness=best,
        lower_source=src,
    )


# -- chromatic number ------------------------------------------------------------------


def dsatur(g: BitGraph) -> List[int]:
    """DSATUR proper coloring; returns a color per vertex."""
    N = g.num_vertices
    if N == 0:
        return []
    deg = g.degrees
    sat = np.zeros(N, dtype=np.int64)
    seen = np.zeros((N, 16), dtype=bool)
    colors = np.full(N, -1, dtype=np.int64)
    key = deg.astype(np.int64).copy()
    scale = int(deg.max()) + 1
    for _ in range(N):
        v = int(np.argmax(key))
        free = np.flatnonzero(~seen[v])
        c = int(free[0]) if len(free) else seen.shape[1]
        if c >= seen.shape[1]:
            seen = np.hstack([seen, np.zeros_like(seen)])
        colors[v] = c
        key[v] = -1
        nb = g.neighbors(v)
        new = nb[~seen[nb, c]]
        seen[new, c] = True
        sat[new] += 1
        alive = new[colors[new] < 0]
        key[alive] = sat[alive] * scale + deg[alive]
    return colors.tolist()


def greedy_clique(g: BitGraph) -> List[int]:
    """Grow a clique by repeatedly taking the candidate with most candidate neighbours."""
    rows = g.rows
    cand = (1 << g.num_vertices) - 1
    clique = []
    while cand:
        v = max(_bits(cand), key=lambda u: (rows[u] & cand).bit_count())
        clique.append(v)
        cand &= rows[v]
    return clique


@dataclass
class ChromaticReport:
    lower: int
    upper: int
    certificates: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def _proper(g: BitGraph, colors: Sequence[int]) -> bool:
    if any(c < 0 for c in colors):
        return False
    classes: Dict[int, int] = {}
    for v, c in enumerate(colors):
        classes[c] = classes.get(c, 0) | (1 << v)
    rows = g.rows
    return all(not (rows[v] & classes[c]) for v, c in enumerate(colors))


def chromatic_bounds(
    g: BitGraph,
    budget: Optional[SearchBudget] = None,
    alpha_upper: Optional[int] = None,
    run_dsatur: bool = True,
) -> ChromaticReport:
    """Upper bounds from DSATUR and the known colorings, lower bounds from a clique and |V|/alpha.

    The ratio bound needs an upper bound on alpha; one is computed with
    ``independence_number`` under ``budget`` unless ``alpha_upper`` is given.
    """
    N = g.num_vertices
    certs: List[dict] = []
    upper = N
    if run_dsatur and N:
        colors = dsatur(g)
        k = max(colors) + 1
        if _proper(g, colors):
            certs.append({"kind": "upper", "source": "dsatur", "value": k})
            upper = min(upper, k)
    if isinstance(g, KneserGraph) and g.n == 5 and g.omega.omega in (LINE_SOLID, LINE_PLANE):
        sp = g.space
        if g.omega.omega == LINE_SOLID:
            col = covering_24(0, sp)
        else:
            line = int(np.flatnonzero(sp.containment(2, 4)[:, 0])[0])
            col = coloring_23_line(0, line, space=sp)
        colors = col.refine(N)
        k = len(set(colors))
        if _proper(g, colors):
            certs.append({"kind": "upper", "source": f"construction:{col.classes[0].name}", "value": k})
            upper = min(upper, k)
    clique = greedy_clique(g) if N else []
    lower = max(len(clique), 1 if N else 0)
    certs.append({"kind": "lower", "source": "clique", "value": len(clique), "witness": sorted(clique)})
    if N:
        if alpha_upper is None:
            rep = independence_number(g, budget or SearchBudget(max_nodes=100_000, max_seconds=30.0))
            alpha_upper, src = rep.upper, "branch-and-bound"
        else:
            src = "supplied"
        ratio = -(-N // alpha_upper)
        certs.append({"kind": "lower", "source": f"ratio |V|/alpha ({src})", "alpha_upper": alpha_upper, "value": ratio})
        lower = max(lower, ratio)
    return ChromaticReport(lower=lower, upper=upper, certificates=certs)


# -- falsification of the second-largest bound ----------------------------------------------


@dataclass
class FalsifierReport:
    omega: List[int]
    q: int
    e1: int
    best_size: int
    family: List[int]
    exceeded_e1: bool
    restarts: int
    discarded: int
    size_histogram: Dict[int, int]
    seconds: float

    def to_json(self) -> dict:
        return asdict(self)


def hm_falsifier(
    g: KneserGraph,
    budget: Optional[SearchBudget] = None,
    restarts: int = 100_000,
    swaps: int = 2,
) -> FalsifierReport:
    """Random maximal EKR sets outside the extremal families; report the largest.

    Each restart grows a random maximal independent set (for {2,4} from a
    seed pair of flags with disjoint lines, so no point-pencil can contain
    it) and then tries ``swaps`` plateau moves: drop a random member and
    regrow.  Candidates that beat the current best are checked explicitly
    against point-pencils ({2,4}) or every extremal line-plane family ({2,3}) and
    discarded if contained.  ``exceeded_e1`` being True would contradict
    the published bound.
    """
    budget = budget or SearchBudget(max_seconds=3600.0)
    om = g.omega.omega
    if g.n != 5 or om not in (LINE_PLANE, LINE_SOLID):
        raise ValueError("falsifier is defined for {2,3} and {2,4} flags of GF(q)^5")
    q = g.q
    e1 = e1_24(q) if om == LINE_SOLID else e1_23(q)
    sp = g.space
    N = g.num_vertices
    rows = g.rows
    bit = [1 << v for v in range(N)]
    full = (1 << N) - 1
    rng = np.random.default_rng(budget.seed)
    t0 = time.monotonic()

    partners = None
    if om == LINE_SOLID:
        lines = sp.flag_ids(om)[:, 0]
        disjoint = ~(sp.incidence(2).astype(np.float32) @ sp.incidence(2).T.astype(np.float32)).astype(bool)
        dense = g.dense()
        partners = [np.flatnonzero(~dense[v] & disjoint[lines[v], lines]).tolist() for v in range(N)]

    def contained(members) -> bool:
        if om == LINE_SOLID:
            return contained_in_point_pencil(sp, om, members) is not None
        return contained_in_example31(sp, members) is not None

    best: List[int] = []
    hist: Dict[int, int] = {}
    discarded = 0
    done = 0
    batch = 256
    while done < restarts:
        if time.monotonic() - t0 > budget.max_seconds:
            break
        m = min(batch, restarts - done)
        perms = rng.permuted(np.tile(np.arange(N), (m, 1)), axis=1).tolist()
        picks = rng.random((m, 2 + 2 * swaps)).tolist()
        for perm, pick in zip(perms, picks):
            S: List[int] = []
            forb = 0
            if partners is not None:
                v = perm[0]
                u = partners[v][int(pick[0] * len(partners[v]))]
                S = [v, u]
                forb = rows[v] | rows[u] | bit[v] | bit[u]
            for v in perm:
                if not forb & bit[v]:
                    S.append(v)
                    forb |= rows[v] | bit[v]
            for k in range(swaps):
                lo = 2 if partners is not None else 0
                if len(S) <= lo:
                    break
                i = lo + int(pick[2 + 2 * k] * (len(S) - lo))
                T = S[:i] + S[i + 1 :]
                forb2 = 0
                for v in T:
                    forb2 |= rows[v] | bit[v]
                free = full & ~forb2 & ~bit[S[i]]
                while free:
                    v = _low(free)
                    T.append(v)
                    free &= ~rows[v] & ~bit[v]
                if len(T) >= len(S):
                    S = T
            size = len(S)
            hist[size] = hist.get(size, 0) + 1
            if size > len(best):
                if contained(S):
                    discarded += 1
                else:
                    best = sorted(S)
        done += m
    exceeded = len(best) > e1
    if best and (independent_witness(g, best) is not None or not is_maximal(g, best)):
        raise AssertionError("falsifier produced an invalid family")
    return FalsifierReport(
        omega=list(om),
        q=q,
        e1=e1,
        best_size=len(best),
        family=best,
        exceeded_e1=exceeded,
        restarts=done,
        discarded=discarded,
        size_histogram=dict(sorted(hist.items())),
        seconds=time.monotonic() - t0,
    )


# -- point-set primitives ---------------------------------------------------------------------


def _point(space: ProjectiveSpace, x) -> Subspace:
    s = space.points[int(x)] if not isinstance(x, Subspace) else x
    if s.dim != 1:
        raise ValueError("expected a point (1-dimensional subspace)")
    return s


def lines_through_meeting(P, M: Iterable, space: Optional[ProjectiveSpace] = None) -> int:
    """Number of lines on P that contain a point of M other than P."""
    space = space or projective_space(P.n, P.q)
    P = _point(space, P)
    return len({(P + Q).rref for Q in (_point(space, x) for x in M) if Q != P})


def heaviest_solid_on_plane(pi: Subspace, M: Iterable, space: Optional[ProjectiveSpace] = None) -> Tuple[Subspace, int]:
    """Solid through ``pi`` holding the most points of M (lowest canonical index on ties)."""
    if pi.dim != 3:
        raise ValueError("expected a plane (3-dimensional subspace)")
    space = space or projective_space(pi.n, pi.q)
    pts = [_point(space, x) for x in M]
    solids = {}
    for Q in space.points:
        if not Q <= pi:
            S = pi + Q
            solids.setdefault(S.rref, S)
    best, best_count = None, -1
    for S in sorted(solids.values(), key=space.index):
        mask = space.point_mask(S)
        c = sum(1 for Q in pts if (mask >> space.index(Q)) & 1)
        if c > best_count:
            best, best_count = S, c
    return best, best_count


class DegenerateInstance(ValueError):
    pass


@dataclass(frozen=True)
class HeavySolidInstance:
    """Point set M with three non-collinear points whose plane misses M.

    ``n`` and ``d`` default to the values observed on M.
    """

    M: Tuple[Subspace, ...]
    P1: Subspace
    P2: Subspace
    P3: Subspace
    m: Union[int, Fraction, float]
    n: Optional[Union[int, Fraction, float]] = None
    d: Optional[Union[int, Fraction, float]] = None

    @property
    def pi(self) -> Subspace:
        return self.P1 + self.P2 + self.P3


def lemma41_hypothesis_check(inst: HeavySolidInstance) -> dict:
    """Evaluate the hypotheses of the heavy-solid lemma on a concrete instance.

    The lemma needs q > 32 n^5 m / d^5, which is astronomically large for
    any useful constants, so ``satisfiable_at_this_q`` is False at desk scale.
    """
    pi = inst.pi
    if pi.dim != 3:
        raise DegenerateInstance("P1, P2, P3 are collinear")
    q = pi.q
    space = projective_space(pi.n, pi.q)
    if any(P <= pi for P in inst.M):
        raise DegenerateInstance("the plane P1P2P3 meets M")
    n_obs = Fraction(max(lines_through_meeting(P, inst.M, space) for P in (inst.P1, inst.P2, inst.P3)), q * q)
    d_obs = Fraction(len(inst.M), q**3)
    n = Fraction(inst.n) if inst.n is not None else n_obs
    d = Fraction(inst.d) if inst.d is not None else d_obs
    m = Fraction(inst.m)
    if d <= 0 or n <= 0 or m <= 0:
        raise DegenerateInstance("m, n and d must be positive")
    threshold = 32 * n**5 * m / d**5
    solid, count = heaviest_solid_on_plane(pi, inst.M, space)
    return {
        "n_observed": float(n_obs),
        "n_ok": n_obs <= n,
        "d": float(d),
        "d_observed": float(d_obs),
        "threshold": float(threshold),
        "q_threshold": math.floor(threshold) + 1,
        "satisfiable_at_this_q": q > threshold,
        "heaviest_solid_count": count,
        "target_count": float(m * q * q),
    }
