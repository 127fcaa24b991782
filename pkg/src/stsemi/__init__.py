"""Semitransitive subsemigroups of the singular part of the symmetric inverse semigroup."""

from .pperm import PartialPerm, ParseError, parse, to_notation
from .semigroup import Semigroup, are_similar, closure, conjugate
from .semitrans import audit_all, blocks, bound, gpd, is_semitransitive, is_transitive

__version__ = "0.1.0"

__all__ = [
    "PartialPerm", "ParseError", "parse", "to_notation",
    "Semigroup", "are_similar", "closure", "conjugate",
    "audit_all", "blocks", "bound", "gpd", "is_semitransitive", "is_transitive",
]
