"""Command-line driver.

stdout carries JSON data, stderr a short human summary.  Exit codes:
0 success, 1 usage or input error, 2 verification failed, 3 search budget
exhausted when ``--require-exact`` was given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import families as fam
from .geometry import (
    EnumerationLimitExceeded,
    FlagType,
    ProjectiveSpace,
    Subspace,
    count_flags,
    gaussian,
    rref_canonicalize,
    theta,
)
from .gf import NotAPrimePower, build_field
from .kneser import build_graph, export_dimacs, export_json_meta
from .search import (
    HeavySolidInstance,
    SearchBudget,
    chromatic_bounds,
    hm_falsifier,
    independence_number,
    lemma41_hypothesis_check,
)

EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _say(*args) -> None:
    print(*args, file=sys.stderr)


def _emit(doc, out: Optional[str] = None) -> None:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _omega(text: str) -> FlagType:
    try:
        return FlagType(int(x) for x in text.replace("{", "").replace("}", "").split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _space(args) -> ProjectiveSpace:
    return ProjectiveSpace(args.n, args.q, args.limit)


def _subspace(space: ProjectiveSpace, text: Optional[str], dim: int, default: Optional[int] = None) -> int:
    """Canonical index of a subspace given as an index or inline JSON."""
    if text is None:
        if default is None:
            raise UsageError(f"missing {dim}-dimensional subspace argument")
        return default
    text = text.strip()
    if text[:1] in "{[":
        doc = json.loads(text)
        s = Subspace.from_json(doc) if isinstance(doc, dict) else rref_canonicalize(doc, space.q, n=space.n)
        if s.dim != dim:
            raise UsageError(f"expected a {dim}-dimensional subspace, got dimension {s.dim}")
        return space.index(s)
    i = int(text)
    if not 0 <= i < space.count(dim):
        raise UsageError(f"index {i} out of range for {dim}-subspaces")
    return i


def _first(mask) -> int:
    return int(np.flatnonzero(mask)[0])


def _budget(args) -> SearchBudget:
    return SearchBudget(max_nodes=args.max_nodes, max_seconds=args.max_seconds, threads=args.threads or 1, seed=args.seed)


# -- commands -----------------------------------------------------------------


def cmd_counts(args) -> int:
    q, n = args.q, args.n
    build_field(q)
    doc = {
        "q": q,
        "n": n,
        "gaussian": {str(k): gaussian(n, k, q) for k in range(n + 1)},
        "theta": {str(m): theta(m, q) for m in range(n)},
    }
    if n == 5:
        doc["flags"] = {"2,3": count_flags(5, (2, 3), q), "2,4": count_flags(5, (2, 4), q)}
        doc["e0_24"], doc["e1_24"] = fam.e0_24(q), fam.e1_24(q)
        doc["e0_23"], doc["e1_23"] = fam.e0_23(q), fam.e1_23(q)
    doc["gaussian_table"] = {f"{a},{b}": gaussian(a, b, q) for a in range(n + 1) for b in range(a + 1)}
    _emit(doc)
    _say("  ".join(f"[{n} {k}]={gaussian(n, k, q)}" for k in range(n + 1)))
    if n == 5:
        _say(f"flags {{2,3}}={doc['flags']['2,3']}  {{2,4}}={doc['flags']['2,4']}  "
             f"e0_23={doc['e0_23']} e1_23={doc['e1_23']} e0_24={doc['e0_24']} e1_24={doc['e1_24']}")
    return 0


def cmd_graph(args) -> int:
    g = build_graph(args.n, args.omega, args.q, threads=args.threads, space=_space(args))
    if args.out:
        export_dimacs(g, args.out)
    meta = export_json_meta(g)
    _emit(meta, args.meta)
    _say(f"qK_{args.n};{list(args.omega.omega)}(q={args.q}): {meta['vertices']} vertices, {meta['edges']} edges, degree {meta['degree']}")
    return 0


def _build_coloring(args, space):
    sp = space
    c = args.construction
    if c == "covering24":
        s = _subspace(sp, args.solid, 4, 0)
        return fam.covering_24(s, sp)
    s = _subspace(sp, args.solid, 4, 0)
    if c in ("line23", "mixed23"):
        l = _subspace(sp, args.line, 2, _first(sp.containment(2, 4)[:, s]))
        if c == "line23":
            return fam.coloring_23_line(s, l, seed=args.seed, space=sp)
        planes = np.flatnonzero(sp.containment(2, 3)[l] & sp.containment(3, 4)[:, s]).tolist()
        R = [planes[int(i)] for i in args.R.split(",") if i.strip()] if args.R else []
        return fam.coloring_23_mixed(s, l, R, seed=args.seed, space=sp)
    if c == "plane23":
        pl = _subspace(sp, args.plane, 3, _first(sp.containment(3, 4)[:, s]))
        W = [_subspace(sp, w, 1) for w in args.W.split(";")] if args.W else None
        ell0 = _subspace(sp, args.line, 2) if args.line else None
        return fam.coloring_23_plane(s, pl, W, seed=args.seed, ell0=ell0, space=sp)
    raise UsageError(f"unknown construction {c}")


def cmd_color(args) -> int:
    if args.n != 5:
        raise UsageError("colorings are defined for n = 5")
    sp = _space(args)
    col = _build_coloring(args, sp)
    omega = tuple(col.graph["omega"])
    N = len(sp.flag_ids(omega))
    doc = col.to_json(N if args.proper else None)
    doc["construction"] = {k: v for k, v in col.meta.items() if k != "nu"}
    doc["construction"]["id"] = args.construction
    _emit(doc, args.out)
    rc = 0
    if args.verify:
        g = build_graph(5, omega, args.q, threads=args.threads, space=sp)
        rep = fam.verify_coloring(g, col)
        _say(f"{args.construction}: {rep.num_classes} classes, cover_ok={rep.cover_ok}, all_independent={rep.all_independent}")
        rc = 0 if rep.ok else EXIT_VERIFY
    else:
        _say(f"{args.construction}: {len(col)} classes")
    if args.classes_expected is not None and len(col) != args.classes_expected:
        _say(f"expected {args.classes_expected} classes, got {len(col)}")
        rc = EXIT_VERIFY
    return rc


def cmd_ekr(args) -> int:
    sp = _space(args)
    k = args.kind
    if k in ("pencil23", "pencil24"):
        omega = (2, 3) if k == "pencil23" else (2, 4)
        family = fam.pencil_family(_subspace(sp, args.point, 1, 0), omega, sp)
    else:
        omega = (2, 3)
        p = _subspace(sp, args.point, 1, 0)
        if k == "PL":
            family = fam.ekr_point_line(p, _subspace(sp, args.line, 2, _first(sp.incidence(2)[:, p])), sp)
        elif k == "PS":
            family = fam.ekr_point_solid(p, _subspace(sp, args.solid, 4, _first(sp.incidence(4)[:, p])), sp)
        elif k == "SP":
            s = _subspace(sp, args.solid, 4, 0)
            family = fam.ekr_solid_plane(s, _subspace(sp, args.plane, 3, _first(sp.containment(3, 4)[:, s])), sp)
        else:
            s = _subspace(sp, args.solid, 4, 0)
            family = fam.ekr_solid_point(s, _subspace(sp, args.point, 1, _first(sp.incidence(4)[s])), sp)
    g = build_graph(sp.n, omega, sp.q, threads=args.threads, space=sp)
    rep = fam.verify_family(g, family)
    doc = {"graph": {"n": sp.n, "q": sp.q, "omega": list(omega)}, "family": family.to_json(),
           "report": {k2: v for k2, v in vars(rep).items() if k2 != "witness"}}
    _emit(doc, args.out)
    _say(f"{family.name}: size {rep.size}, independent={rep.independent}, maximal={rep.maximal}")
    return 0 if rep.independent else EXIT_VERIFY


def _verify_doc(doc, threads) -> bool:
    key = doc["graph"]
    omega = tuple(key["omega"])
    g = build_graph(key["n"], omega, key["q"], threads=threads)
    if "classes" in doc:
        col = fam.Coloring.from_json(doc)
        rep = fam.verify_coloring(g, col)
        ok = rep.ok
        if "colors" in doc:
            colors = doc["colors"]
            ok = ok and len(colors) == g.num_vertices and colors == col.refine(g.num_vertices)
        _say(f"coloring: {rep.num_classes} classes, cover_ok={rep.cover_ok}, all_independent={rep.all_independent}"
             + (f", uncovered={rep.uncovered}" if rep.uncovered else ""))
        return ok
    if "family" in doc:
        f = fam.FlagFamily.from_json(doc["family"])
        rep = fam.verify_family(g, f)
        _say(f"family {f.name}: size {rep.size}, independent={rep.independent}, maximal={rep.maximal}")
        return rep.independent
    raise UsageError("document has neither 'classes' nor 'family'")


def cmd_verify(args) -> int:
    files = args.files or ["-"]
    ok = True
    for path in files:
        text = sys.stdin.read() if path == "-" else open(path).read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: not JSON ({exc})")
        ok = _verify_doc(doc, args.threads) and ok
    _say("verification passed" if ok else "verification FAILED")
    return 0 if ok else EXIT_VERIFY


def cmd_alpha(args) -> int:
    g = build_graph(args.n, args.omega, args.q, threads=args.threads, space=_space(args))
    rep = independence_number(g, _budget(args))
    doc = rep.to_json()
    _emit(doc, args.out)
    _say(f"alpha in [{rep.lower}, {rep.upper}] exact={rep.exact} nodes={rep.nodes_expanded} ({rep.seconds:.1f}s)")
    if args.require_exact and not rep.exact:
        return EXIT_BUDGET
    return 0


def cmd_chi(args) -> int:
    g = build_graph(args.n, args.omega, args.q, threads=args.threads, space=_space(args))
    rep = chromatic_bounds(g, _budget(args), alpha_upper=args.alpha_upper, run_dsatur=not args.no_dsatur)
    _emit(rep.to_json(), args.out)
    _say(f"chi in [{rep.lower}, {rep.upper}]")
    return 0


def cmd_falsify(args) -> int:
    g = build_graph(args.n, args.omega, args.q, threads=args.threads, space=_space(args))
    rep = hm_falsifier(g, _budget(args), restarts=args.restarts)
    _emit(rep.to_json(), args.out)
    if rep.exceeded_e1:
        _say(f"!!! FOUND AN EKR SET OF SIZE {rep.best_size} > e1 = {rep.e1} OUTSIDE THE EXTREMAL FAMILIES !!!")
        return EXIT_VERIFY
    _say(f"best non-extremal maximal EKR set: {rep.best_size} <= e1 = {rep.e1} over {rep.restarts} restarts")
    return 0


def cmd_identity(args) -> int:
    qs = range(args.q_min, args.q_max + 1) if args.q is None else [args.q]
    rows = [fam.lemma51_identity(q) for q in qs]
    _emit({"identity": rows})
    bad = [r["q"] for r in rows if not r["equal"]]
    _say("identity holds for all q" if not bad else f"identity FAILS for q in {bad}")
    return 0 if not bad else EXIT_VERIFY


def cmd_heavy_solid(args) -> int:
    sp = _space(args)
    P = [sp.points[_subspace(sp, x, 1)] for x in (args.P1, args.P2, args.P3)]
    pi = P[0] + P[1] + P[2]
    if args.points:
        M = [sp.points[_subspace(sp, x, 1)] for x in args.points.split(";")]
    else:
        rng = np.random.default_rng(args.seed)
        off = [Q for Q in sp.points if not Q <= pi]
        M = [off[i] for i in sorted(rng.choice(len(off), size=min(args.random_size, len(off)), replace=False))]
    inst = HeavySolidInstance(tuple(M), P[0], P[1], P[2], m=args.m, n=args.lines_n, d=args.d)
    rep = lemma41_hypothesis_check(inst)
    _emit(rep, args.out)
    _say(f"q={sp.q}: threshold {rep['threshold']:.3g}, satisfiable at this q: {rep['satisfiable_at_this_q']}")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qkneser", description="Flag Kneser graphs of PG(4, q): counts, graphs, EKR sets, colorings, searches.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, omega=False):
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--n", type=int, default=5)
        sp.add_argument("--limit", type=int, default=None, help="enumeration limit (default: $QKNESER_LIMIT or 2e6)")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", default=None)
        if omega:
            sp.add_argument("--omega", type=_omega, required=True, help="flag type, e.g. 2,3")

    def budget(sp, nodes=1_000_000, seconds=60.0):
        sp.add_argument("--max-nodes", type=int, default=nodes)
        sp.add_argument("--max-seconds", type=float, default=seconds)
        sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("counts", help="Gaussian coefficients, flag counts and size constants")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, default=5)
    s.set_defaults(func=cmd_counts)

    s = sub.add_parser("graph", help="build a graph, write DIMACS and JSON meta")
    common(s, omega=True)
    s.add_argument("--meta", default=None, help="write JSON meta here instead of stdout")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("color", help="emit one of the known colorings as JSON")
    common(s)
    s.add_argument("--construction", required=True, choices=["covering24", "line23", "plane23", "mixed23"])
    s.add_argument("--solid")
    s.add_argument("--line", help="line l (line23/mixed23) or ell0 (plane23)")
    s.add_argument("--plane")
    s.add_argument("--W", help="plane23: ';'-separated points, q-1 on ell0 then P_q")
    s.add_argument("--R", help="mixed23: comma-separated positions among the planes on l in S")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--proper", action="store_true", help="also emit the refined proper coloring")
    s.add_argument("--verify", action="store_true", help="build the graph and verify before exiting")
    s.add_argument("--classes-expected", type=int, default=None)
    s.set_defaults(func=cmd_color)

    s = sub.add_parser("ekr", help="emit and verify one EKR family")
    common(s)
    s.add_argument("--kind", required=True, choices=["PL", "PS", "SP", "SQ", "pencil23", "pencil24"])
    s.add_argument("--point")
    s.add_argument("--line")
    s.add_argument("--plane")
    s.add_argument("--solid")
    s.set_defaults(func=cmd_ekr)

    s = sub.add_parser("verify", help="verify coloring/family JSON files ('-' = stdin)")
    s.add_argument("files", nargs="*")
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("alpha", help="bounds on the independence number")
    common(s, omega=True)
    budget(s)
    s.add_argument("--require-exact", action="store_true")
    s.set_defaults(func=cmd_alpha)

    s = sub.add_parser("chi", help="bounds on the chromatic number")
    common(s, omega=True)
    budget(s, nodes=100_000, seconds=30.0)
    s.add_argument("--alpha-upper", type=int, default=None, help="known upper bound on alpha for the ratio bound")
    s.add_argument("--no-dsatur", action="store_true")
    s.set_defaults(func=cmd_chi)

    s = sub.add_parser("falsify", help="search for large EKR sets outside the extremal families")
    common(s, omega=True)
    budget(s, seconds=3600.0)
    s.add_argument("--restarts", type=int, default=100_000)
    s.set_defaults(func=cmd_falsify)

    s = sub.add_parser("identity", help="check the line-plane flag count identity")
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--q-min", type=int, default=2)
    s.add_argument("--q-max", type=int, default=16)
    s.set_defaults(func=cmd_identity)

    s = sub.add_parser("heavy-solid", help="evaluate the heavy-solid lemma hypotheses on an instance")
    common(s)
    s.add_argument("--P1", required=True)
    s.add_argument("--P2", required=True)
    s.add_argument("--P3", required=True)
    s.add_argument("--points", help="';'-separated points of M")
    s.add_argument("--random-size", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--lines-n", type=float, default=None, help="the constant n of the lemma (default: observed)")
    s.add_argument("--d", type=float, default=None)
    s.set_defaults(func=cmd_heavy_solid)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, NotAPrimePower, EnumerationLimitExceeded, fam.IncidenceViolation,
            fam.ConstructionUnsatisfiable, ValueError, KeyError, OSError) as exc:
        _say(f"qkneser {args.command}: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
