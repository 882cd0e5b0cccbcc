"""Analysis and simulation toolkit for a two-node trapped-ion photonic link.

Subpackages and modules:

- ``qcore``: small dense linear algebra and density-matrix utilities
- ``measure``: Pauli and waveplate/polariser measurement effects
- ``metrics``: fully entangled fraction, concurrence, entanglement of formation
- ``tomo``: count tables, maximum-likelihood fits, bootstrap and posterior error bars
- ``optics``: free-space and fibre-coupled photon collection
- ``netsim``: heralding protocol timing, rates and analyser model
- ``datasets``, ``pipeline``, ``plotdata``, ``cli``: data, orchestration and output
"""
from .errors import ConvergenceError, IonLinkError, NumericalError, ParseError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "IonLinkError",
    "NumericalError",
    "ParseError",
    "ValidationError",
    "__version__",
]
