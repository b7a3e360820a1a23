"""Linear Dirac geometry, boundary spectra of twisted first-order operators,
spinor modules and finite q-Hamiltonian checks."""
from .dirac import DiracMorphism, DiracStructure
from .errors import DiracError
from .linear_core import Subspace
from .orthogonal import lag_from_orth, orth_from_lag
from .spectral import BoundaryOperator

__version__ = "0.1.0"

__all__ = ["DiracMorphism", "DiracStructure", "DiracError", "Subspace",
           "lag_from_orth", "orth_from_lag", "BoundaryOperator", "__version__"]
