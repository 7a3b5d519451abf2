"""Boundedness and compactness of monomial operators on L^2(0, 1)."""

__version__ = "0.1.0"

from .catalog import ENTRIES as CATALOG  # noqa: E402
from .expr import parse  # noqa: E402
from .measure import DecideConfig, LineMeasure, decide  # noqa: E402
from .oracle import galerkin_matrix, sv_scan  # noqa: E402
from .symbols import MonomialSpec, affine_symbols  # noqa: E402
from .verdict import Verdict, VerdictClass  # noqa: E402

__all__ = [
    "CATALOG",
    "DecideConfig",
    "LineMeasure",
    "MonomialSpec",
    "Verdict",
    "VerdictClass",
    "affine_symbols",
    "decide",
    "galerkin_matrix",
    "parse",
    "sv_scan",
]
