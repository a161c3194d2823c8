"""Schiffer operators, Grunsky matrices and scattering for genus-zero cap complexes.

The modules build on each other in this order:

``series``      truncated power series arithmetic
``capmap``      cap maps, cap complexes and their validation
``spaces``      Bergman-space bases, coefficient vectors and boundary restriction
``grunsky``     Grunsky coefficients from generating functions
``schiffer``    Schiffer operator matrices by contour or area quadrature
``scattering``  scattering matrix, overfare, refinement ladder, harmonic measures
``hbvp``        holomorphic boundary value problem for one-forms
``cli``         command-line interface
"""

from .capmap import (
    CapComplex,
    CapMap,
    OverlapViolation,
    UnivalenceViolation,
    apply_mobius,
    build_complex,
    complex_from_json,
    load_complex,
)
from .grunsky import GrunskyMatrix, grunsky_generating, grunsky_matrix, spectral_norm
from .hbvp import HbvpData, HbvpSolution, Unsolvable, manufacture, solve
from .scattering import (
    ScatteringMatrix,
    ScatteringReport,
    assemble_scattering,
    harmonic_measures,
    overfare_mismatch,
    refinement_ladder,
)
from .schiffer import OperatorMatrix, adjoint_check, t_matrix, theta_matrix
from .series import TruncatedSeries
from .spaces import BasisId, BasisKind, CoeffVector, HarmonicPair, boundary_restriction

__version__ = "0.1.0"

__all__ = [
    "BasisId",
    "BasisKind",
    "CapComplex",
    "CapMap",
    "CoeffVector",
    "GrunskyMatrix",
    "HarmonicPair",
    "HbvpData",
    "HbvpSolution",
    "OperatorMatrix",
    "OverlapViolation",
    "ScatteringMatrix",
    "ScatteringReport",
    "TruncatedSeries",
    "UnivalenceViolation",
    "Unsolvable",
    "adjoint_check",
    "apply_mobius",
    "assemble_scattering",
    "boundary_restriction",
    "build_complex",
    "complex_from_json",
    "grunsky_generating",
    "grunsky_matrix",
    "harmonic_measures",
    "load_complex",
    "manufacture",
    "overfare_mismatch",
    "refinement_ladder",
    "solve",
    "spectral_norm",
    "t_matrix",
    "theta_matrix",
]
