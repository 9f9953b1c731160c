"""Focal values of plane polynomial systems over exchangeable
coefficient rings: exact evaluation, modular random search, and
Jacobian-rank certification."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402,F401
    COEFFICIENT_NAMES,
    COEFFICIENT_WEIGHTS,
    FocalSequence,
    PolySystem,
    first_nonzero,
    focal_values,
    symbolic_focal_values,
    verify_identity,
)
from .homog import HomogPoly, MotionSeries, rotation_apply, rotation_solve  # noqa: F401
from .rings import (  # noqa: F401
    DualRing,
    NonInvertibleError,
    PrimeField,
    RationalField,
    SparsePolyRing,
)
