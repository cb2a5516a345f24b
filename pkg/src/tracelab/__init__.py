"""Exact trace-function values, block constructions and exhaustive checks for hereditary families."""

from .errors import (
    CapacityError,
    CertificateError,
    DomainError,
    NoTheoremError,
    ResourceLimitError,
    TracelabError,
)
from .family import HereditaryFamily, SetFamily

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CertificateError",
    "DomainError",
    "HereditaryFamily",
    "NoTheoremError",
    "ResourceLimitError",
    "SetFamily",
    "TracelabError",
    "__version__",
]
