"""DCSK two-way relay network coding: simulation and closed-form BER."""

from .channel import AWGN_LINK, LinkRealization, TwoRayChannel, TwoRayLink
from .chaos import ChaosStream
from .kernels import BACKEND
from .schemes import Scenario, Scheme

__version__ = "0.1.0"

__all__ = [
    "AWGN_LINK",
    "BACKEND",
    "ChaosStream",
    "LinkRealization",
    "Scenario",
    "Scheme",
    "TwoRayChannel",
    "TwoRayLink",
    "__version__",
]
