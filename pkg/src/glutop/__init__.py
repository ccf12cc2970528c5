"""Subobject classifiers and dependent products for finite set-valued diagrams,
built by matching objects and gluing and checked against brute-force oracles."""

from .diagcat import Diagram, DiagramCategory, NatTrans, make_diagram, make_nat
from .errors import GlutopError, Violation
from .fincat import FinCategory, FinFunctor, InverseStructure
from .homotopy import LocalizationData, bounded_localization, pi_comparison
from .logicat import FinSetMap, FinSetObj, finset_handle
from .matching import char_inverse, matching_object, omega_inverse, pi_inverse

__all__ = [
    "Diagram", "DiagramCategory", "NatTrans", "make_diagram", "make_nat",
    "GlutopError", "Violation", "FinCategory", "FinFunctor", "InverseStructure",
    "LocalizationData", "bounded_localization", "pi_comparison",
    "FinSetMap", "FinSetObj", "finset_handle",
    "char_inverse", "matching_object", "omega_inverse", "pi_inverse",
]

__version__ = "0.1.0"
