"""Borel cohomology and h-invariants of circle-equivariant complexes of type SWF."""

from .errors import BorelError
from .exactalg import GF, QQ, ZZ, Ring, parse_ring, smith_normal_form
from .tcomplex import (
    AdmissibleComplex,
    AttachmentCochain,
    CochainMap,
    attach_free_cell,
    fixed_degree,
    free_summand,
    point,
    smash,
    sphere,
    validate,
    wedge,
    xab,
)
from .cohomology import (
    cochain_matrix,
    cohomology_at,
    restriction_image,
    stabilization_bound,
    stable_tate,
    tower_decomposition,
)
from .hinv import froyshov_check, h_invariants, manifold_report, prime_profile, verify_properties

__all__ = [
    "BorelError",
    "GF",
    "QQ",
    "ZZ",
    "Ring",
    "parse_ring",
    "smith_normal_form",
    "AdmissibleComplex",
    "AttachmentCochain",
    "CochainMap",
    "attach_free_cell",
    "fixed_degree",
    "free_summand",
    "point",
    "smash",
    "sphere",
    "validate",
    "wedge",
    "xab",
    "cochain_matrix",
    "cohomology_at",
    "restriction_image",
    "stabilization_bound",
    "stable_tate",
    "tower_decomposition",
    "froyshov_check",
    "h_invariants",
    "manifold_report",
    "prime_profile",
    "verify_properties",
]
