"""Geometric invariants of complex ball quotients and effective bounds driven by the systole."""
from .hermitian import GroupElement, HermitianForm, InvalidInput, MembershipError, standard_form
from .isometry import IsometryClass, classify, translation_length
from .kernels import BACKEND
from .siegel import SiegelPoint, distance, embed, unembed

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GroupElement", "HermitianForm", "InvalidInput", "IsometryClass", "MembershipError",
    "SiegelPoint", "classify", "distance", "embed", "standard_form", "translation_length", "unembed",
    "__version__",
]
