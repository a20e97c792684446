"""Mod-Poisson convergence: exact laws, approximation schemes and distances."""

from .lattice_measure import (
    LaurentResidue,
    LevyExponent,
    SignedLatticeMeasure,
    distance_kolmogorov,
    distance_local,
    distance_tv,
    scheme_measure,
)
from .models import get_model

__all__ = [
    "LaurentResidue",
    "LevyExponent",
    "SignedLatticeMeasure",
    "distance_kolmogorov",
    "distance_local",
    "distance_tv",
    "get_model",
    "scheme_measure",
]

__version__ = "0.1.0"
