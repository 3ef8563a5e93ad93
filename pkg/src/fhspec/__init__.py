"""Spectral asymptotics of products of Toeplitz matrices with Fisher-Hartwig symbols.

Submodules:

* :mod:`fhspec.specfun` - Gamma/Beta based constants
* :mod:`fhspec.symbol` - symbols and their Fourier coefficients
* :mod:`fhspec.toeplitz` - Toeplitz operators, FFT matvec, power iterations
* :mod:`fhspec.kernelop` - the limit kernel and its integral operator
* :mod:`fhspec.experiments` - config-driven campaigns behind the ``fhspec`` CLI
"""

from .errors import ConfigError, ConvergenceError, DimensionError, DomainError, HypothesisError
from .symbol import RegularPart, Singularity, SymbolSpec, UnitCirclePoint
from .kernelop import KernelParams
from .toeplitz import ToeplitzOperator

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "DomainError",
    "HypothesisError",
    "KernelParams",
    "RegularPart",
    "Singularity",
    "SymbolSpec",
    "ToeplitzOperator",
    "UnitCirclePoint",
]
