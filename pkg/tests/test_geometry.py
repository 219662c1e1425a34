import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkneser.geometry import (
    AmbientMismatch,
    DimensionMismatch,
    EnumerationLimitExceeded,
    Flag,
    FlagType,
    ProjectiveSpace,
    Subspace,
    count_flags,
    dual,
    enumerate_flags,
    enumerate_subspaces,
    gaussian,
    general_position,
    intersect,
    point_pencil,
    projective_space,
    rref_canonicalize,
    subspace_sum,
    theta,
    transform,
)


def span_oracle(rows, q, n):
    """All vectors spanned by ``rows`` over a prime field, by brute force."""
    out = set()
    for coeffs in itertools.product(range(q), repeat=len(rows)):
        out.add(tuple(sum(c * r[i] for c, r in zip(coeffs, rows)) % q for i in range(n)))
    return frozenset(out)


def random_rows(rng, k, n, q):
    return [[rng.randrange(q) for _ in range(n)] for _ in range(k)]


# -- canonical forms --------------------------------------------------------------


def test_rref_examples():
    assert rref_canonicalize([[0] * 5], 2).dim == 0
    assert rref_canonicalize([[2, 0, 0, 0, 0]], 3).rref == ((1, 0, 0, 0, 0),)
    u = rref_canonicalize([[1, 1, 0], [0, 1, 1], [1, 0, 1]], 2)
    assert u.rref == ((1, 0, 1), (0, 1, 1))
    assert rref_canonicalize([], 2, n=4) == Subspace.zero(4, 2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        rref_canonicalize([[1, 0], [1, 0, 0]], 2)
    with pytest.raises(DimensionMismatch):
        rref_canonicalize([], 2)
    with pytest.raises(AmbientMismatch):
        subspace_sum(Subspace.full(3, 2), Subspace.full(4, 2))


@pytest.mark.parametrize("q", [2, 3, 5])
def test_rref_canonical_on_random_generators(q):
    # two generator sets span the same space iff they give the same RREF
    rng = random.Random(q)
    n = 5
    for _ in range(10_000 // 3):
        k = rng.randint(0, 4)
        rows = random_rows(rng, k, n, q)
        u = rref_canonicalize(rows, q, n=n)
        # linear combinations of the rows add nothing
        mix = []
        for _ in range(k + 1):
            cs = [rng.randrange(q) for _ in rows]
            mix.append([sum(c * r[i] for c, r in zip(cs, rows)) % q for i in range(n)])
        w = rref_canonicalize(rows[::-1] + mix, q, n=n)
        assert w == u


@pytest.mark.parametrize("q", [2, 3])
def test_rref_agrees_with_vector_sets(q):
    rng = random.Random(10 + q)
    seen = {}
    for _ in range(300):
        rows = random_rows(rng, rng.randint(1, 3), 4, q)
        u = rref_canonicalize(rows, q)
        vs = span_oracle(rows, q, 4)
        assert frozenset(u.vectors()) == vs
        assert seen.setdefault(vs, u.rref) == u.rref


@st.composite
def subspaces(draw, n=5, q=3):
    k = draw(st.integers(0, n))
    rows = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=k, max_size=k))
    return rref_canonicalize(rows, q, n=n)


@settings(max_examples=200, deadline=None)
@given(subspaces(), subspaces())
def test_dimension_formula(u, w):
    s, i = u + w, u & w
    assert s.dim + i.dim == u.dim + w.dim
    assert i <= u and i <= w and u <= s and w <= s
    assert len(set(u.vectors()) & set(w.vectors())) == 3**i.dim


@settings(max_examples=100, deadline=None)
@given(subspaces(), subspaces(), subspaces())
def test_lattice_laws(u, w, x):
    assert (u & w) & x == u & (w & x)
    assert u & u == u and u + u == u
    assert intersect(u, u + w) == u
    # modular law for u <= x
    if u <= x:
        assert (u + w) & x == u + (w & x)


def test_dual_of_trivial():
    assert dual(Subspace.zero(5, 2)) == Subspace.full(5, 2)
    assert dual(Subspace.full(5, 3)) == Subspace.zero(5, 3)


# -- counting --------------------------------------------------------------------


def test_gaussian_values():
    assert gaussian(3, 1, 3) == 13
    assert gaussian(4, 1, 3) == 40
    assert gaussian(4, 2, 3) == 130
    assert gaussian(5, 2, 3) == 1210
    assert gaussian(5, 0, 7) == 1
    assert gaussian(3, 4, 2) == 0
    assert theta(2, 2) == 7 and theta(3, 3) == 40


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_gaussian_symmetry(q):
    for a in range(9):
        for b in range(a + 1):
            assert gaussian(a, b, q) == gaussian(a, a - b, q)


@pytest.mark.parametrize("q", [2, 3])
def test_gaussian_matches_enumeration(q):
    for n in range(1, 6):
        for k in range(n + 1):
            assert len(enumerate_subspaces(n, k, q)) == gaussian(n, k, q)


def test_enumeration_against_vector_set_oracle():
    # every k-subset of nonzero vectors of GF(2)^4 spans something; collect distinct spans
    vecs = [v for v in itertools.product(range(2), repeat=4) if any(v)]
    for k in range(1, 4):
        spans = {span_oracle(list(c), 2, 4) for c in itertools.combinations(vecs, k)}
        spans = {s for s in spans if len(s) == 2**k}
        ours = {frozenset(s.vectors()) for s in enumerate_subspaces(4, k, 2)}
        assert ours == spans


def test_enumeration_order_and_uniqueness():
    subs = enumerate_subspaces(5, 2, 3)
    keys = [tuple(x for r in s.rref for x in r) for s in subs]
    assert len(set(keys)) == len(keys) == 1210
    assert all(s.dim == 2 for s in subs)
    assert enumerate_subspaces(5, 2, 3) == subs


def test_enumeration_limit():
    with pytest.raises(EnumerationLimitExceeded):
        ProjectiveSpace(5, 5, limit=1000).subspaces(2)
    with pytest.raises(EnumerationLimitExceeded):
        enumerate_flags(5, (2, 3), 5, limit=100_000)


def test_limit_from_environment(monkeypatch):
    monkeypatch.setenv("QKNESER_LIMIT", "10")
    with pytest.raises(EnumerationLimitExceeded):
        ProjectiveSpace(5, 2).subspaces(2)


@pytest.mark.parametrize("omega,q,count", [((2, 3), 2, 1085), ((2, 4), 2, 1085), ((1,), 2, 31), ((1, 2, 3, 4), 2, 9765)])
def test_flag_counts(omega, q, count):
    assert count_flags(5, omega, q) == count
    assert len(enumerate_flags(5, omega, q)) == count


def test_flags_against_nested_oracle(pg2):
    lines, planes = pg2.subspaces(2), pg2.subspaces(3)
    vl = [set(l.vectors()) for l in lines]
    vp = [set(p.vectors()) for p in planes]
    oracle = [(i, j) for i in range(len(lines)) for j in range(len(planes)) if vl[i] <= vp[j]]
    assert [tuple(r) for r in pg2.flag_ids((2, 3)).tolist()] == oracle


def test_flag_validation():
    p = rref_canonicalize([[1, 0, 0, 0, 0]], 2)
    l = rref_canonicalize([[0, 1, 0, 0, 0], [0, 0, 1, 0, 0]], 2)
    with pytest.raises(ValueError):
        Flag((p, l))
    with pytest.raises(ValueError):
        Flag((Subspace.full(5, 2),))
    with pytest.raises(ValueError):
        FlagType((3, 2))
    with pytest.raises(ValueError):
        FlagType((2, 5)).validate(5)


def test_json_roundtrip(pg3):
    f = pg3.flags((2, 3))[777]
    assert Flag.from_json(f.to_json()) == f
    s = pg3.subspaces(3)[55]
    assert Subspace.from_json(s.to_json()) == s


# -- duality and general position ----------------------------------------------------


def test_dual_involution_on_flags(pg2):
    flags = pg2.flags((2, 3))
    for f in flags:
        d = dual(f)
        assert d.type.omega == (2, 3)
        assert dual(d) == f
    vmap = pg2.dual_vertex_map((2, 3))
    assert sorted(vmap.tolist()) == list(range(1085))
    assert np.array_equal(vmap[vmap], np.arange(1085))


def test_dual_type_mapping(pg2):
    assert FlagType((2, 4)).dual(5).omega == (1, 3)
    f = pg2.flags((2, 4))[10]
    assert dual(f).type.omega == (1, 3)


def test_general_position_basics(pg2):
    rng = random.Random(3)
    flags = pg2.flags((2, 3))
    for f in flags[:50]:
        assert not general_position(f, f)
    for _ in range(1000):
        f, g = rng.choice(flags), rng.choice(flags)
        assert general_position(f, g) == general_position(g, f)


def test_general_position_planes_meet_in_point(pg3):
    rng = random.Random(4)
    flags = pg3.flags((2, 3))
    hits = 0
    for _ in range(2000):
        f, g = rng.choice(flags), rng.choice(flags)
        if general_position(f, g):
            hits += 1
            assert (f.spaces[1] & g.spaces[1]).dim == 1
            assert (f.spaces[0] & g.spaces[0]).dim == 0
    assert hits > 0


def test_transform_preserves_general_position(pg2):
    rng = np.random.default_rng(1)
    from qkneser.kneser import random_invertible_matrix

    flags = pg2.flags((2, 4))
    m = random_invertible_matrix(5, 2, rng)
    for _ in range(300):
        i, j = rng.integers(0, len(flags), size=2)
        f, g = flags[i], flags[j]
        assert general_position(f, g) == general_position(transform(f, m), transform(g, m))


# -- point-pencils ------------------------------------------------------------------


def test_point_pencil_sizes(pg2, pg3):
    p3 = pg3.points[0]
    assert len(point_pencil(p3, (2, 4), pg3)) == 520
    p2 = pg2.points[5]
    pen = point_pencil(p2, (2, 3), pg2)
    assert len(pen) == 105
    brute = [f for f in pg2.flags((2, 3)) if p2 <= f.spaces[0]]
    assert pen == brute


@pytest.mark.parametrize("omega", [(1, 3), (2, 3), (2, 4), (3, 4)])
def test_point_pencil_contains_point(pg2, omega):
    for idx in (0, 17, 30):
        P = pg2.points[idx]
        pen = set(point_pencil(P, omega, pg2))
        for f in pg2.flags(omega):
            assert (f in pen) == (P <= f.spaces[0])


def test_point_pencil_rejects_lines(pg2):
    with pytest.raises(ValueError):
        point_pencil(pg2.subspaces(2)[0], (2, 3), pg2)
