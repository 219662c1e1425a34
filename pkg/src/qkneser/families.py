"""EKR families and colorings of the flag graphs of PG(4, q).

Vertex ids are positions in ``space.flag_ids(omega)``, which is also the
vertex order of ``build_graph``; families built on a space can therefore be
checked against any graph built on the same (n, q, omega).

Line-plane flags are written (h, pi) with h a line (vector dim 2) and pi a
plane (vector dim 3).  The four maximal EKR families are

* ``F(P, l)``  = {(h, pi) : P in h  or  l inside pi}
* ``F(P, S)``  = {(h, pi) : P in h  or  P in pi inside S}
* ``F(S, t)``  = {(h, pi) : pi inside S  or  h inside t}
* ``F(S, P)``  = {(h, pi) : pi inside S  or  P in h inside S}
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .geometry import FlagType, ProjectiveSpace, Subspace, projective_space, theta
from .kneser import BitGraph, KneserGraph, independent_witness

__all__ = [
    "IncidenceViolation",
    "ConstructionUnsatisfiable",
    "FlagFamily",
    "Coloring",
    "FamilyReport",
    "ColoringReport",
    "e0_24",
    "e1_24",
    "e0_23",
    "e1_23",
    "pencil_family",
    "ekr_point_line",
    "ekr_point_solid",
    "ekr_solid_plane",
    "ekr_solid_point",
    "example31_families",
    "contained_in_example31",
    "contained_in_point_pencil",
    "dual_family",
    "covering_24",
    "coloring_23_line",
    "coloring_23_plane",
    "coloring_23_mixed",
    "verify_nu",
    "verify_family",
    "verify_coloring",
    "is_maximal",
    "lemma51_identity",
]

LINE_PLANE = (2, 3)
LINE_SOLID = (2, 4)


class IncidenceViolation(ValueError):
    pass


class ConstructionUnsatisfiable(RuntimeError):
    pass


# -- size constants -----------------------------------------------------------


def e0_24(q: int) -> int:
    return theta(3, q) * theta(2, q)


def e1_24(q: int) -> int:
    return 2 * q**4 + 3 * q**3 + 4 * q**2 + 2 * q + 1


def e0_23(q: int) -> int:
    return theta(2, q) * (theta(3, q) + q * q)


def e1_23(q: int) -> int:
    return 4 * q**4 + 9 * q**3 + 4 * q**2 + q + 1


def lemma51_identity(q: int) -> dict:
    """Both sides of: #line-plane flags = (theta_3 - q) e0 - (2q^7 + ... + q^2)."""
    from .geometry import gaussian

    lhs = gaussian(5, 3, q) * gaussian(3, 2, q)
    rhs = (theta(3, q) - q) * e0_23(q) - (2 * q**7 + 3 * q**6 + 4 * q**5 + 3 * q**4 + 2 * q**3 + q**2)
    return {"q": q, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}


# -- data types -----------------------------------------------------------------


@dataclass(frozen=True)
class FlagFamily:
    name: str
    params: dict
    members: frozenset
    generic: Optional[frozenset] = None
    special: Optional[frozenset] = None

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def sorted_members(self) -> List[int]:
        return sorted(self.members)

    def to_json(self) -> dict:
        return {"name": self.name, "params": self.params, "members": self.sorted_members()}

    @classmethod
    def from_json(cls, doc: dict) -> "FlagFamily":
        return cls(doc["name"], dict(doc.get("params", {})), frozenset(int(v) for v in doc["members"]))


@dataclass
class Coloring:
    classes: List[FlagFamily]
    graph: dict
    mode: str = "cover"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.classes)

    def refine(self, num_vertices: int) -> List[int]:
        """Proper coloring: each vertex gets the first class containing it (-1 if none)."""
        colors = [-1] * num_vertices
        for c, fam in enumerate(self.classes):
            for v in fam.members:
                if colors[v] < 0:
                    colors[v] = c
        return colors

    def to_json(self, num_vertices: Optional[int] = None) -> dict:
        doc = {"graph": dict(self.graph), "mode": self.mode, "classes": [c.to_json() for c in self.classes]}
        if num_vertices is not None:
            doc["colors"] = self.refine(num_vertices)
        return doc

    def dumps(self, num_vertices: Optional[int] = None) -> str:
        return json.dumps(self.to_json(num_vertices), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> "Coloring":
        return cls([FlagFamily.from_json(c) for c in doc["classes"]], dict(doc["graph"]), doc.get("mode", "cover"))


@dataclass
class FamilyReport:
    independent: bool
    maximal: bool
    size: int
    contained_in_point_pencil: Optional[int]
    matches_example_31: Optional[str]
    witness: Optional[tuple] = None


@dataclass
class ColoringReport:
    num_classes: int
    cover_ok: bool
    all_independent: bool
    class_size_histogram: Dict[int, int]
    uncovered: int = 0
    bad_classes: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.cover_ok and self.all_independent


# -- line-plane incidence helper ---------------------------------------------


class _LinePlane:
    """Incidence arrays indexed by the vertex order of the {2,3} flags."""

    def __init__(self, space: ProjectiveSpace):
        if space.n != 5:
            raise ValueError("line-plane families are defined in GF(q)^5")
        self.space = space
        self.q = space.q
        ids = space.flag_ids(LINE_PLANE)
        self.line = ids[:, 0]
        self.plane = ids[:, 1]
        self.pt_line = space.incidence(2)
        self.pt_plane = space.incidence(3)
        self.pt_solid = space.incidence(4)
        self.line_plane = space.containment(2, 3)
        self.line_solid = space.containment(2, 4)
        self.plane_solid = space.containment(3, 4)

    def line_through(self, a: int, b: int) -> int:
        return int(np.flatnonzero(self.pt_line[:, a] & self.pt_line[:, b])[0])

    def points_of(self, inc: np.ndarray, i: int) -> List[int]:
        return np.flatnonzero(inc[i]).tolist()


def _lp(space: ProjectiveSpace) -> _LinePlane:
    cached = getattr(space, "_line_plane", None)
    if cached is None:
        cached = _LinePlane(space)
        space._line_plane = cached
    return cached


def _idx(space: ProjectiveSpace, x: Union[Subspace, int], dim: int) -> int:
    if isinstance(x, Subspace):
        if x.dim != dim:
            raise IncidenceViolation(f"expected a {dim}-dimensional subspace, got dimension {x.dim}")
        return space.index(x)
    i = int(x)
    if not 0 <= i < space.count(dim):
        raise IncidenceViolation(f"no {dim}-subspace with index {i}")
    return i


def _space_for(x, space):
    if space is not None:
        return space
    if isinstance(x, Subspace):
        return projective_space(x.n, x.q)
    raise ValueError("pass space= when subspaces are given by index")


def _ids(mask: np.ndarray) -> frozenset:
    return frozenset(np.flatnonzero(mask).tolist())


def _family(name, params, generic_mask, special_extra):
    members = generic_mask | special_extra
    return FlagFamily(name, params, _ids(members), _ids(generic_mask), _ids(members & ~generic_mask))


# -- extremal line-plane families --------------------------------------------------------


def pencil_family(point, omega, space: Optional[ProjectiveSpace] = None) -> FlagFamily:
    space = _space_for(point, space)
    p = _idx(space, point, 1)
    omega = FlagType(omega).omega
    return FlagFamily("pencil", {"point": p, "omega": list(omega)}, frozenset(space.point_pencil_ids(p, omega).tolist()))


def ekr_point_line(point, line, space: Optional[ProjectiveSpace] = None) -> FlagFamily:
    """F(P, l) = {(h, pi) : P in h or l inside pi}; requires P in l."""
    space = _space_for(point, space)
    g = _lp(space)
    p, l = _idx(space, point, 1), _idx(space, line, 2)
    if not g.pt_line[l, p]:
        raise IncidenceViolation("point is not on the line")
    return _family("F(P,l)", {"P": p, "l": l}, g.pt_line[g.line, p], g.line_plane[l, g.plane])


def ekr_point_solid(point, solid, space: Optional[ProjectiveSpace] = None) -> FlagFamily:
    """F(P, S) = {(h, pi) : P in h or P in pi inside S}; requires P in S."""
    space = _space_for(point, space)
    g = _lp(space)
    p, s = _idx(space, point, 1), _idx(space, solid, 4)
    if not g.pt_solid[s, p]:
        raise IncidenceViolation("point is not in the solid")
    return _family("F(P,S)", {"P": p, "S": s}, g.pt_line[g.line, p], g.pt_plane[g.plane, p] & g.plane_solid[g.plane, s])


def ekr_solid_plane(solid, plane, space: Optional[ProjectiveSpace] = None) -> FlagFamily:
    """F(S, t) = {(h, pi) : pi inside S or h inside t}; requires t inside S."""
    space = _space_for(solid, space)
    g = _lp(space)
    s, t = _idx(space, solid, 4), _idx(space, plane, 3)
    if not g.plane_solid[t, s]:
        raise IncidenceViolation("plane is not in the solid")
    return _family("F(S,t)", {"S": s, "t": t}, g.plane_solid[g.plane, s], g.line_plane[g.line, t])


def ekr_solid_point(solid, point, space: Optional[ProjectiveSpace] = None) -> FlagFamily:
    """F(S, P) = {(h, pi) : pi inside S or P in h inside S}; requires P in S."""
    space = _space_for(solid, space)
    g = _lp(space)
    s, p = _idx(space, solid, 4), _idx(space, point, 1)
    if not g.pt_solid[s, p]:
        raise IncidenceViolation("point is not in the solid")
    return _family("F(S,P)", {"S": s, "P": p}, g.plane_solid[g.plane, s], g.pt_line[g.line, p] & g.line_solid[g.line, s])


def example31_families(space: ProjectiveSpace, kind: str) -> Iterable[FlagFamily]:
    """Every family of one kind: 'PL', 'PS', 'SP' (solid-plane) or 'SQ' (solid-point)."""
    g = _lp(space)
    if kind == "PL":
        for p in range(space.count(1)):
            for l in np.flatnonzero(g.pt_line[:, p]):
                yield ekr_point_line(p, int(l), space)
    elif kind == "PS":
        for p in range(space.count(1)):
            for s in np.flatnonzero(g.pt_solid[:, p]):
                yield ekr_point_solid(p, int(s), space)
    elif kind == "SP":
        for s in range(space.count(4)):
            for t in np.flatnonzero(g.plane_solid[:, s]):
                yield ekr_solid_plane(s, int(t), space)
    elif kind == "SQ":
        for s in range(space.count(4)):
            for p in np.flatnonzero(g.pt_solid[s]):
                yield ekr_solid_point(s, int(p), space)
    else:
        raise ValueError(f"unknown family kind {kind!r}")


def contained_in_example31(space: ProjectiveSpace, members) -> Optional[str]:
    """Name and parameters of some extremal line-plane family containing ``members``, or None.

    Exhaustive over all parameters: the base point (or solid) is looped over
    and the second parameter is solved for with one vectorised test.
    """
    g = _lp(space)
    m = np.fromiter(members, dtype=np.int64)
    if len(m) == 0:
        return "empty"
    h, pi = g.line[m], g.plane[m]
    x_pt_h = g.pt_line[h]  # [member, point]
    for p in range(space.count(1)):
        rest = ~x_pt_h[:, p]
        # F(P, l): l through P contained in every remaining plane
        cand = g.line_plane[:, pi[rest]].all(axis=1) & g.pt_line[:, p]
        if cand.any():
            return f"F(P,l) P={p} l={int(np.flatnonzero(cand)[0])}"
        if not g.pt_plane[pi[rest], p].all():
            continue
        cand = g.plane_solid[pi[rest]].all(axis=0) & g.pt_solid[:, p]
        if cand.any():
            return f"F(P,S) P={p} S={int(np.flatnonzero(cand)[0])}"
    x_pi_s = g.plane_solid[pi]  # [member, solid]
    for s in range(space.count(4)):
        rest = ~x_pi_s[:, s]
        cand = g.line_plane[h[rest]].all(axis=0) & g.plane_solid[:, s]
        if cand.any():
            return f"F(S,t) S={s} t={int(np.flatnonzero(cand)[0])}"
        if not g.line_solid[h[rest], s].all():
            continue
        cand = g.pt_line[h[rest]].all(axis=0) & g.pt_solid[s]
        if cand.any():
            return f"F(S,P) S={s} P={int(np.flatnonzero(cand)[0])}"
    return None


def contained_in_point_pencil(space: ProjectiveSpace, omega, members) -> Optional[int]:
    """Some base point whose pencil contains ``members``, or None."""
    omega = FlagType(omega).omega
    m = np.fromiter(members, dtype=np.int64)
    if len(m) == 0:
        return 0
    first = space.flag_ids(omega)[m, 0]
    hits = space.incidence(omega[0])[first].all(axis=0)
    return int(np.flatnonzero(hits)[0]) if hits.any() else None


def dual_family(space: ProjectiveSpace, fam: FlagFamily, omega=LINE_PLANE) -> FlagFamily:
    vmap = space.dual_vertex_map(omega)
    return FlagFamily(f"dual {fam.name}", dict(fam.params), frozenset(int(vmap[v]) for v in fam.members))


# -- colorings -------------------------------------------------------------------------


def _rotate(seq: Sequence, seed: int) -> list:
    seq = list(seq)
    if not seq:
        return seq
    k = seed % len(seq)
    return seq[k:] + seq[:k]


def _graph_key(space, omega):
    return {"n": space.n, "q": space.q, "omega": list(omega)}


def covering_24(solid, space: Optional[ProjectiveSpace] = None) -> Coloring:
    """Point-pencils of {2,4}-flags over all points of a solid."""
    space = _space_for(solid, space)
    s = _idx(space, solid, 4)
    pts = np.flatnonzero(space.incidence(4)[s]).tolist()
    classes = [pencil_family(p, LINE_SOLID, space) for p in pts]
    return Coloring(classes, _graph_key(space, LINE_SOLID), meta={"solid": s})


def _classes_from_nu(space, nu: Dict[int, int]) -> List[FlagFamily]:
    return [ekr_point_line(p, nu[p], space) for p in sorted(nu)]


def _line_scheme(space, s: int, l: int, seed: int):
    """Shared set-up of the line-based constructions.

    Returns (P0, [P_1..P_q], {plane: [l_1..l_q]}), all numberings derived
    from the canonical order rotated by ``seed``.
    """
    g = _lp(space)
    if not g.line_solid[l, s]:
        raise IncidenceViolation("line is not in the solid")
    pts = _rotate(g.points_of(g.pt_line, l), seed)
    p0, w = pts[0], pts[1:]
    planes = np.flatnonzero(g.line_plane[l] & g.plane_solid[:, s]).tolist()
    numbering = {}
    for pi in planes:
        lines = [int(m) for m in np.flatnonzero(g.line_plane[:, pi] & g.pt_line[:, p0]) if m != l]
        numbering[pi] = _rotate(lines, seed)
    return p0, w, numbering


def coloring_23_line(solid, line, seed: int = 0, space: Optional[ProjectiveSpace] = None) -> Coloring:
    """theta_3 - q EKR sets F(P, nu(P)) with the q missing points on one line."""
    space = _space_for(solid, space)
    g = _lp(space)
    s, l = _idx(space, solid, 4), _idx(space, line, 2)
    p0, w, numbering = _line_scheme(space, s, l, seed)
    nu = {p0: l}
    for pi, lines in numbering.items():
        for i, li in enumerate(lines):
            for p in g.points_of(g.pt_line, li):
                if p != p0:
                    nu[p] = g.line_through(p, w[i])
    meta = {"solid": s, "line": l, "P0": p0, "W": w, "nu": nu, "seed": seed}
    return Coloring(_classes_from_nu(space, nu), _graph_key(space, LINE_PLANE), meta=meta)


def coloring_23_plane(
    solid,
    plane,
    W: Optional[Sequence] = None,
    seed: int = 0,
    ell0=None,
    space: Optional[ProjectiveSpace] = None,
) -> Coloring:
    """theta_3 - q EKR sets with the q missing points spanning a plane.

    ``W`` lists q points of ``plane``: the first q-1 on a line ``ell0`` and the
    last one, P_q, off it.  For q = 2 the line ``ell0`` is not determined by
    W and is taken from ``ell0`` or chosen from the seed.  ``W=None`` picks
    a configuration from the seed.
    """
    space = _space_for(solid, space)
    g = _lp(space)
    q = space.q
    s, pl = _idx(space, solid, 4), _idx(space, plane, 3)
    if not g.plane_solid[pl, s]:
        raise IncidenceViolation("plane is not in the solid")
    plane_lines = np.flatnonzero(g.line_plane[:, pl]).tolist()

    if W is None:
        l0 = _idx(space, ell0, 2) if ell0 is not None else _rotate(plane_lines, seed)[0]
        on = _rotate(g.points_of(g.pt_line, l0), seed)
        off = [p for p in g.points_of(g.pt_plane, pl) if not g.pt_line[l0, p]]
        w = on[: q - 1] + [_rotate(off, seed)[0]]
    else:
        w = [_idx(space, p, 1) for p in W]
        if len(w) != q or len(set(w)) != q:
            raise IncidenceViolation(f"W must consist of {q} distinct points")
        if not all(g.pt_plane[pl, p] for p in w):
            raise IncidenceViolation("W is not inside the plane")
        if ell0 is not None:
            l0 = _idx(space, ell0, 2)
        elif q >= 3:
            l0 = g.line_through(w[0], w[1])
        else:
            l0 = next(m for m in _rotate(plane_lines, seed) if g.pt_line[m, w[0]] and not g.pt_line[m, w[1]])
    pq = w[-1]
    if not g.line_plane[l0, pl] or not all(g.pt_line[l0, p] for p in w[:-1]) or g.pt_line[l0, pq]:
        raise IncidenceViolation("W must be q-1 points on a line of the plane plus one point off it")

    q0, q1 = _rotate([p for p in g.points_of(g.pt_line, l0) if p not in w], seed)
    lq = g.line_through(q0, pq)
    others = _rotate([m for m in plane_lines if g.pt_line[m, q0] and m not in (l0, lq)], seed)
    inner_lines = others + [lq]  # l_1..l_q with l_q = Q0 P_q

    nu: Dict[int, int] = {q0: l0, q1: g.line_through(q1, pq)}
    for i, li in enumerate(inner_lines[:-1]):
        for p in g.points_of(g.pt_line, li):
            if p != q0:
                nu[p] = g.line_through(p, w[i])
    for p in g.points_of(g.pt_line, lq):
        if p not in (q0, pq):
            nu[p] = lq

    free = [m for m in _rotate(plane_lines, seed) if not any(g.pt_line[m, p] for p in w)]
    if not free:
        raise ConstructionUnsatisfiable("every line of the plane meets W")
    gl = free[0]
    ext_planes = _rotate([int(t) for t in np.flatnonzero(g.line_plane[gl] & g.plane_solid[:, s]) if t != pl], seed)
    for i, pi in enumerate(ext_planes):
        for p in g.points_of(g.pt_plane, pi):
            if not g.pt_plane[pl, p]:
                nu[p] = g.line_through(p, w[i])
    meta = {"solid": s, "plane": pl, "ell0": l0, "W": w, "g": gl, "Q0": q0, "Q1": q1, "nu": nu, "seed": seed}
    return Coloring(_classes_from_nu(space, nu), _graph_key(space, LINE_PLANE), meta=meta)


def coloring_23_mixed(solid, line, R: Iterable = (), seed: int = 0, space: Optional[ProjectiveSpace] = None) -> Coloring:
    """F(P0, l) plus, per plane on l in S, line-based classes (plane in R) or point-solid classes."""
    space = _space_for(solid, space)
    g = _lp(space)
    s, l = _idx(space, solid, 4), _idx(space, line, 2)
    p0, w, numbering = _line_scheme(space, s, l, seed)
    R = {_idx(space, t, 3) for t in R}
    if not R <= set(numbering):
        raise IncidenceViolation("R must consist of planes of the solid through the line")
    classes = [ekr_point_line(p0, l, space)]
    for pi, lines in numbering.items():
        solids = _rotate([int(t) for t in np.flatnonzero(g.plane_solid[pi]) if t != s], seed)
        for i, li in enumerate(lines):
            for p in g.points_of(g.pt_line, li):
                if p == p0:
                    continue
                if pi in R:
                    classes.append(ekr_point_line(p, g.line_through(p, w[i]), space))
                else:
                    classes.append(ekr_point_solid(p, solids[i], space))
    meta = {"solid": s, "line": l, "P0": p0, "W": w, "R": sorted(R), "seed": seed}
    return Coloring(classes, _graph_key(space, LINE_PLANE), meta=meta)


def verify_nu(space: ProjectiveSpace, solid: int, W: Sequence[int], nu: Dict[int, int]) -> dict:
    """Check the hypotheses on (W, nu) that make {F(P, nu(P))} a cover."""
    g = _lp(space)
    pts_s = set(np.flatnonzero(g.pt_solid[solid]).tolist())
    domain_ok = set(nu) == pts_s - set(W) and len(W) == space.q
    incidence_ok = all(g.pt_line[l, p] and g.line_solid[l, solid] for p, l in nu.items())
    meeting = {int(l) for l in np.flatnonzero(g.line_solid[:, solid]) if any(g.pt_line[l, p] for p in W)}
    image_ok = meeting <= set(nu.values())
    return {"domain_ok": domain_ok, "incidence_ok": incidence_ok, "image_ok": image_ok,
            "ok": domain_ok and incidence_ok and image_ok}


# -- verification -------------------------------------------------------------------------


def is_maximal(g: BitGraph, members) -> bool:
    """No vertex outside ``members`` is non-adjacent to all of them."""
    m = g.mask(members)
    for v, row in enumerate(g.rows):
        if not (m >> v) & 1 and not row & m:
            return False
    return True


def verify_family(g: KneserGraph, fam: FlagFamily) -> FamilyReport:
    members = g._check_ids(fam.members)
    witness = independent_witness(g, members)
    independent = witness is None
    maximal = independent and is_maximal(g, members)
    pencil = contained_in_point_pencil(g.space, g.omega, members)
    match = None
    if g.n == 5 and g.omega.omega == LINE_PLANE and len(members) == e0_23(g.q):
        match = contained_in_example31(g.space, members)
    return FamilyReport(independent, maximal, len(members), pencil, match, witness)


def verify_coloring(g: BitGraph, c: Coloring) -> ColoringReport:
    cover = 0
    bad = []
    for k, fam in enumerate(c.classes):
        cover |= g.mask(fam.members)
        if independent_witness(g, fam.members) is not None:
            bad.append(k)
    full = (1 << g.num_vertices) - 1
    uncovered = g.num_vertices - cover.bit_count()
    hist = Counter(len(f) for f in c.classes)
    return ColoringReport(
        num_classes=len(c.classes),
        cover_ok=cover == full,
        all_independent=not bad,
        class_size_histogram=dict(sorted(hist.items())),
        uncovered=uncovered,
        bad_classes=bad,
    )
