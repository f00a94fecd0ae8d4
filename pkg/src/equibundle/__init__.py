"""Exact-arithmetic equivariant bundle calculus.

Modules:

* :mod:`equibundle.exact_core` -- rationals, prime fields, Laurent polynomials
  and unit-determinant Laurent matrices.
* :mod:`equibundle.projline` -- bundles on the projective line, Birkhoff
  factorization, splitting types, and the section-count oracle.
* :mod:`equibundle.graded` -- graded modules over graded polynomial algebras,
  graded Nakayama, lifting of graded maps, fixed-point ideals.
* :mod:`equibundle.filtered` -- filtered modules, associated graded data,
  filtration splitting over fields and nilpotent extensions.
* :mod:`equibundle.hensel` -- henselian-pair predicates for finite-dimensional
  algebras and idempotent lifting.
* :mod:`equibundle.topospace` -- finite posets as finite spectral spaces:
  connected components, clopen subsets, and the pi0 criteria.
* :mod:`equibundle.cli` -- document formats and the command-line interface.
"""

from equibundle.exact_core import (
    GF,
    QQ,
    FieldMismatchError,
    FpElement,
    LaurentMatrix,
    LaurentPoly,
    UnitDeterminantError,
)
from equibundle.projline import (
    BundleOnP1,
    SplittingType,
    birkhoff_factorize,
    cocharacter_to_bundle,
    h0_dimension,
    splitting_type,
)

__all__ = [
    "GF",
    "QQ",
    "FieldMismatchError",
    "FpElement",
    "LaurentMatrix",
    "LaurentPoly",
    "UnitDeterminantError",
    "BundleOnP1",
    "SplittingType",
    "birkhoff_factorize",
    "cocharacter_to_bundle",
    "h0_dimension",
    "splitting_type",
]

__version__ = "0.1.0"
