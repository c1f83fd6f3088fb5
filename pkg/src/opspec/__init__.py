"""Drazin inverses, ascent/descent and Drazin-type spectra of finitely presented operators."""

from .errors import (
    IncompatibleOperands,
    IrrationalSpectrum,
    NonCommuting,
    NotFiniteRank,
    NumericAmbiguity,
    OpspecError,
    UnsupportedImage,
)
from .kernels import BACKEND
from .matrix import (
    DrazinResult,
    GaussianMatrix,
    JordanPresentation,
    ascent_descent,
    drazin_inverse,
    eigen_clusters,
    matrix_poles,
    minimal_polynomial,
    rank,
)
from .multiplication import duality_report, realize
from .operators import (
    Operator,
    SpectralProfile,
    combine,
    is_algebraic,
    is_meromorphic,
    perturb_finite_rank,
    spectral_profile,
)
from .scalars import ComplexValue, Polynomial, ToleranceFrame, cv
from .spectra import PoleSet, SpectralSet, acc_set, includes, iso_points, set_relation

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ComplexValue",
    "DrazinResult",
    "GaussianMatrix",
    "IncompatibleOperands",
    "IrrationalSpectrum",
    "JordanPresentation",
    "NonCommuting",
    "NotFiniteRank",
    "NumericAmbiguity",
    "Operator",
    "OpspecError",
    "PoleSet",
    "Polynomial",
    "SpectralProfile",
    "SpectralSet",
    "ToleranceFrame",
    "UnsupportedImage",
    "acc_set",
    "ascent_descent",
    "combine",
    "cv",
    "drazin_inverse",
    "duality_report",
    "eigen_clusters",
    "includes",
    "is_algebraic",
    "is_meromorphic",
    "iso_points",
    "matrix_poles",
    "minimal_polynomial",
    "perturb_finite_rank",
    "rank",
    "realize",
    "set_relation",
    "spectral_profile",
]
