"""Exact computations on q-Kneser graphs of flags in GF(q)^5."""

from .gf import FieldTable, NotAPrimePower, build_field, field_axiom_check
from .geometry import (
    AmbientMismatch,
    DimensionMismatch,
    EnumerationLimitExceeded,
    Flag,
    FlagType,
    ProjectiveSpace,
    Subspace,
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
)
from .kneser import KneserGraph, build_graph, export_dimacs, export_json_meta, is_independent

__version__ = "0.1.0"
