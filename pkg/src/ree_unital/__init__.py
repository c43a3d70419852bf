"""Ree-Tits unitals: the order-3 unital from SL(2,8) and RT(q) from the Ree root group."""

from .design_core import IncidenceStructure, find_dual_kn, isomorphism_search, verify_2design
from .finite_fields import F3nCtx, F8Elt, make_field
from .rt_unital import build_rt, intersection_search, join_rt, string_of_pearls
from .unital_s import build_unital_s

__version__ = "0.1.0"

__all__ = [
    "F3nCtx",
    "F8Elt",
    "IncidenceStructure",
    "build_rt",
    "build_unital_s",
    "find_dual_kn",
    "intersection_search",
    "isomorphism_search",
    "join_rt",
    "make_field",
    "string_of_pearls",
    "verify_2design",
]
