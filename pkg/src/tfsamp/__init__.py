"""Planar sampling sets for the short-time Fourier transform.

Explicit constants, transforms and inequalities for Hermite-window STFTs,
polyanalytic Bargmann machinery and (gamma, R)-dense planar regions, with
numerical checks of every verifiable inequality.
"""

from tfsamp.errors import CapabilityError, DomainError, PreconditionError

__version__ = "0.1.0"

__all__ = ["CapabilityError", "DomainError", "PreconditionError", "__version__"]
