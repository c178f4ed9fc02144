"""Exact ring presentations for torus-equivariant quantum cohomology of
Springer resolutions of classical type, with the operator, degeneration and
integrable-system machinery needed to verify them symbolically."""

__version__ = "1.0.0"

from .rootdata import (Coroot, DomainError, RootSystem, Weight,
                       build_root_system, pairing, reflect,
                       stabilizer_generators)
from .symbolic import (RAT_ONE, RAT_ZERO, LimitDivergenceError, PolyExpr,
                       RatExpr, SymMatrix, char_poly, determinant)
from .weyl import (CosetList, InvariantViolation, ResourceError, WeylElem,
                   all_elements, coset_min_rep, min_coset_reps, offdiag_root,
                   simple_reflection)

__all__ = [
    "__version__",
    "Coroot", "DomainError", "RootSystem", "Weight", "build_root_system",
    "pairing", "reflect", "stabilizer_generators",
    "RAT_ONE", "RAT_ZERO", "LimitDivergenceError", "PolyExpr", "RatExpr",
    "SymMatrix", "char_poly", "determinant",
    "CosetList", "InvariantViolation", "ResourceError", "WeylElem",
    "all_elements", "coset_min_rep", "min_coset_reps", "offdiag_root",
    "simple_reflection",
]
