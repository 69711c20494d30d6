"""Exact null-vector machinery for affine sl(n) and SLE-type growth simulation."""

__version__ = "0.1.0"

from .liecore import (  # noqa: F401
    LieData,
    LieDataError,
    SquaredGeneratorTable,
    FiniteRep,
    build_sl,
    build_finite_rep,
    squared_table,
    conformal_weight,
    central_charge,
)
