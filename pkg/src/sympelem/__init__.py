"""Exact-arithmetic toolkit for elementary symplectic groups over
commutative rings: block generators, identity verification, word
rewriting into the four-shape generating set, and localization
machinery (conjugation decompositions, dilation, patching)."""

from .rings import Localized, PolyRing, Rationals, Ring, Zmod, parse_element, ring_from_descriptor
from .matrices import Matrix
from .words import Word

__all__ = [
    "Localized", "PolyRing", "Rationals", "Ring", "Zmod",
    "parse_element", "ring_from_descriptor", "Matrix", "Word",
]

__version__ = "0.1.0"
