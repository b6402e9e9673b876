"""chdef: exact certification of parabolic-preserving deformations into SU(n,1).

Exact layer: Laurent arithmetic over Q[u, u^-1] with the circle involution
(`ring`), free-group words and representations (`words`), the figure-eight
boundary-unipotent family (`figure8`), and bending along block stabilizers
(`bending`).  Numeric layer: complex-hyperbolic geometry, isometry
classification, and horoball consistency audits (`chgeom`).
"""

from .ring import Laurent, RingMatrix, char_poly, sesquilinear_value
from .words import Presentation, Representation, Word, parse_word, reduced_words
from .figure8 import FigureEightFamily, build_family
from .bending import BendingDatum, bend, peripheral_rotation, twist_matrix, verify_centralizes
from .chgeom import (
    AuditReport,
    BoundaryPoint,
    HermitianForm,
    Horoball,
    IsometryClass,
    ProjPoint,
    Tolerances,
    busemann,
    calibrate_level,
    classify_isometry,
    consistency_audit,
    distance,
    fixed_boundary_point,
    orthogeodesic_length,
    parabolic_preserving_audit,
    shadow_contains,
    transport_horoball,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BendingDatum",
    "BoundaryPoint",
    "FigureEightFamily",
    "HermitianForm",
    "Horoball",
    "IsometryClass",
    "Laurent",
    "Presentation",
    "ProjPoint",
    "Representation",
    "RingMatrix",
    "Tolerances",
    "Word",
    "bend",
    "build_family",
    "busemann",
    "calibrate_level",
    "char_poly",
    "classify_isometry",
    "consistency_audit",
    "distance",
    "fixed_boundary_point",
    "orthogeodesic_length",
    "parabolic_preserving_audit",
    "parse_word",
    "peripheral_rotation",
    "reduced_words",
    "sesquilinear_value",
    "shadow_contains",
    "transport_horoball",
    "twist_matrix",
    "verify_centralizes",
]
