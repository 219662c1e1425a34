import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkneser.families import LINE_PLANE, LINE_SOLID, contained_in_point_pencil, e0_23, e0_24, is_maximal
from qkneser.geometry import rref_canonicalize
from qkneser.kneser import BitGraph, is_independent
from qkneser.search import (
    DegenerateInstance,
    HeavySolidInstance,
    SearchBudget,
    chromatic_bounds,
    dsatur,
    greedy_clique,
    heaviest_solid_on_plane,
    hm_falsifier,
    independence_number,
    lemma41_hypothesis_check,
    lines_through_meeting,
    max_independent_set,
)


def alpha_oracle(n, edges):
    adj = {(i, j) for i, j in edges} | {(j, i) for i, j in edges}
    for k in range(n, 0, -1):
        for S in itertools.combinations(range(n), k):
            if all((a, b) not in adj for a, b in itertools.combinations(S, 2)):
                return k
    return 0


def chi_oracle(n, edges):
    for k in range(1, n + 1):
        for cols in itertools.product(range(k), repeat=n):
            if all(cols[i] != cols[j] for i, j in edges):
                return k
    return 0


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = [p for p in pairs if draw(st.booleans())]
    return n, edges


def test_complete_graph():
    g = BitGraph.from_edges(4, itertools.combinations(range(4), 2))
    r = independence_number(g)
    assert (r.lower, r.upper, r.exact) == (1, 1, True)
    c = chromatic_bounds(g)
    assert (c.lower, c.upper) == (4, 4)


def test_edgeless_graph():
    g = BitGraph.from_edges(5, [])
    r = independence_number(g)
    assert (r.lower, r.upper, r.exact) == (5, 5, True)
    c = chromatic_bounds(g)
    assert (c.lower, c.upper) == (1, 1)


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_alpha_matches_brute_force(graph):
    n, edges = graph
    g = BitGraph.from_edges(n, edges)
    r = independence_number(g)
    assert r.exact
    assert r.lower == r.upper == alpha_oracle(n, edges)
    assert is_independent(g, r.witness)


@settings(max_examples=60, deadline=None)
@given(small_graphs(max_n=6))
def test_chromatic_bounds_sandwich(graph):
    n, edges = graph
    g = BitGraph.from_edges(n, edges)
    c = chromatic_bounds(g)
    assert c.lower <= chi_oracle(n, edges) <= c.upper
    cols = dsatur(g)
    assert all(cols[i] != cols[j] for i, j in edges)
    clique = greedy_clique(g)
    assert all(g.adjacent(a, b) for a, b in itertools.combinations(clique, 2))


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_nodes=0)


def test_seeds_give_e0_at_once(g23_2, g24_2):
    for g, e0 in ((g23_2, e0_23(2)), (g24_2, e0_24(2))):
        r = independence_number(g, SearchBudget(max_nodes=50, max_seconds=5))
        assert r.lower >= e0
        assert r.upper >= r.lower
        assert not r.exact
        assert is_independent(g, r.witness)


def test_search_deterministic_under_node_budget(g24_2):
    b = SearchBudget(max_nodes=3000, max_seconds=60)
    r1 = independence_number(g24_2, b)
    r2 = independence_number(g24_2, b)
    assert (r1.lower, r1.upper, r1.nodes_expanded, r1.witness) == (r2.lower, r2.upper, r2.nodes_expanded, r2.witness)


def test_upper_bound_sound_on_random_graphs():
    rng = random.Random(5)
    for _ in range(20):
        n = 22
        edges = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.3]
        g = BitGraph.from_edges(n, edges)
        exact = independence_number(g).lower
        best, upper, closed, nodes = max_independent_set(g, SearchBudget(max_nodes=5))
        assert len(best) <= exact <= upper


def test_chromatic_q2(g23_2):
    c = chromatic_bounds(g23_2, alpha_upper=e0_23(2) * 3, run_dsatur=False)
    assert c.upper <= 13
    assert c.lower <= c.upper


def test_falsifier_short_runs(g23_2, g24_2, pg2):
    for g in (g24_2, g23_2):
        rep = hm_falsifier(g, SearchBudget(seed=1), restarts=300)
        assert rep.restarts == 300
        assert not rep.exceeded_e1
        assert rep.best_size <= rep.e1
        assert is_independent(g, rep.family) and is_maximal(g, rep.family)
        if g is g24_2:
            assert contained_in_point_pencil(pg2, LINE_SOLID, rep.family) is None


def test_falsifier_reproducible(g24_2):
    a = hm_falsifier(g24_2, SearchBudget(seed=7), restarts=200)
    b = hm_falsifier(g24_2, SearchBudget(seed=7), restarts=200)
    assert a.family == b.family and a.size_histogram == b.size_histogram


# -- point-set primitives -----------------------------------------------------------


def test_lines_through_meeting_small(pg3):
    P = pg3.points[0]
    assert lines_through_meeting(P, [], pg3) == 0
    assert lines_through_meeting(P, [P], pg3) == 0
    assert lines_through_meeting(P, [pg3.points[1]], pg3) == 1


def test_lines_through_meeting_oracle(pg3):
    rng = random.Random(2)
    inc = pg3.incidence(2)
    for _ in range(5):
        p = rng.randrange(len(pg3.points))
        M = rng.sample(range(len(pg3.points)), 50)
        lines = np.flatnonzero(inc[:, p])
        want = sum(1 for l in lines if any(inc[l, x] and x != p for x in M))
        assert lines_through_meeting(p, M, pg3) == want


def test_heaviest_solid(pg3):
    inc3, inc4 = pg3.incidence(3), pg3.incidence(4)
    rng = random.Random(8)
    pi_idx = 17
    pi = pg3.subspaces(3)[pi_idx]
    off = [i for i in range(len(pg3.points)) if not inc3[pi_idx, i]]
    M = rng.sample(off, 60)
    solid, count = heaviest_solid_on_plane(pi, M, pg3)
    assert pi <= solid
    solids = [s for s in range(pg3.count(4)) if pg3.containment(3, 4)[pi_idx, s]]
    counts = [int(inc4[s, M].sum()) for s in solids]
    assert count == max(counts)
    assert pg3.index(solid) == solids[counts.index(max(counts))]
    empty, c0 = heaviest_solid_on_plane(pi, [], pg3)
    assert c0 == 0 and pi <= empty


def _pts(rows, q=3):
    return [rref_canonicalize([r], q) for r in rows]


def test_heavy_solid_hypotheses_unsatisfiable_at_desk_scale(pg3):
    P1, P2, P3, A, B = _pts([
        [1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]])
    inst = HeavySolidInstance(M=(A, B), P1=P1, P2=P2, P3=P3, m=5, n=9, d=Fraction(1, 4))
    r = lemma41_hypothesis_check(inst)
    assert r["threshold"] == 32 * 9**5 * 5 * 4**5
    assert not r["satisfiable_at_this_q"]
    assert r["q_threshold"] > 3


def test_heavy_solid_degenerate_instances():
    P1, P2, A = _pts([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 1, 0]])
    P12 = rref_canonicalize([[1, 1, 0, 0, 0]], 3)
    with pytest.raises(DegenerateInstance):
        lemma41_hypothesis_check(HeavySolidInstance(M=(A,), P1=P1, P2=P2, P3=P12, m=1))
    P3 = rref_canonicalize([[0, 0, 1, 0, 0]], 3)
    on_plane = rref_canonicalize([[1, 1, 1, 0, 0]], 3)
    with pytest.raises(DegenerateInstance):
        lemma41_hypothesis_check(HeavySolidInstance(M=(on_plane,), P1=P1, P2=P2, P3=P3, m=1))
