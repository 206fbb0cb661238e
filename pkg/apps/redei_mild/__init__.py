"""Rédei 符号、三重 Massey 积与 pro-2 群温和性证书。"""

from .errors import CapacityError, DomainError, InconsistencyError, RedeiError
from .massey import MasseyTensor, build_tensor, inflate_tensor, mild_certificate, mild_search
from .presentation import PrimeSet, gst_admissible, zassenhaus_ge3
from .redei import RedeiEngine, redei_symbol

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "InconsistencyError",
    "MasseyTensor",
    "PrimeSet",
    "RedeiEngine",
    "RedeiError",
    "build_tensor",
    "gst_admissible",
    "inflate_tensor",
    "mild_certificate",
    "mild_search",
    "redei_symbol",
    "zassenhaus_ge3",
    "__version__",
]
