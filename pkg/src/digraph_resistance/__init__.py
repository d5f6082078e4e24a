from __future__ import annotations

from importlib.metadata import version as _version

from digraph_resistance.core import (
    DigraphFormatError,
    DigraphResistanceError,
    GeneratorError,
    IdentityViolationError,
    InvalidDigraphError,
    NotBalancedError,
    NotConnectedError,
    NotStronglyConnectedError,
    ShapeError,
    SingularMatrixError,
)
from digraph_resistance.digraph import (
    BlockDecomposition,
    ClassCCertificate,
    Digraph,
    blocks,
    class_c_certificate,
    degrees,
    is_balanced,
    is_directed_cactus,
    is_strongly_connected,
    one_point_union,
    shortest_distances,
)
from digraph_resistance.generators import GenSpec, fixture, generate
from digraph_resistance.linalg import RatMatrix
from digraph_resistance.spectral import (
    ResistanceResult,
    glue_quantities,
    kappa,
    laplacian,
    pinv_balanced,
    resistance,
)
from digraph_resistance.verify import (
    VerifyReport,
    check_arc_bound,
    check_conjecture,
    check_identities,
    verify_theorem_main,
)

__version__ = _version("digraph-resistance")

__all__ = [
    "BlockDecomposition",
    "ClassCCertificate",
    "Digraph",
    "DigraphFormatError",
    "DigraphResistanceError",
    "GenSpec",
    "GeneratorError",
    "IdentityViolationError",
    "InvalidDigraphError",
    "NotBalancedError",
    "NotConnectedError",
    "NotStronglyConnectedError",
    "RatMatrix",
    "ResistanceResult",
    "ShapeError",
    "SingularMatrixError",
    "VerifyReport",
    "blocks",
    "check_arc_bound",
    "check_conjecture",
    "check_identities",
    "class_c_certificate",
    "degrees",
    "fixture",
    "generate",
    "glue_quantities",
    "is_balanced",
    "is_directed_cactus",
    "is_strongly_connected",
    "kappa",
    "laplacian",
    "one_point_union",
    "pinv_balanced",
    "resistance",
    "shortest_distances",
    "verify_theorem_main",
]
