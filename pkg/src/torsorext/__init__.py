"""Exact extension of pointed torsors to models over a discrete valuation ring.

The ring R is modelled as k[pi] localized at (pi); every computation stays
inside polynomial rings k[pi, ...] with exact coefficients in F_p or Q.
"""

from .scalars import FieldDescriptor, Scalar, GF, QQ
from .poly import VariableRegistry, MultiPoly, RingMap, Role
from .groebner import IdealPresentation, MonomialOrder

__all__ = [
    "FieldDescriptor",
    "Scalar",
    "GF",
    "QQ",
    "VariableRegistry",
    "MultiPoly",
    "RingMap",
    "Role",
    "IdealPresentation",
    "MonomialOrder",
]

__version__ = "0.1.0"
