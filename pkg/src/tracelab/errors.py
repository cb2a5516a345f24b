"""Exception hierarchy shared by all tracelab modules."""


class TracelabError(Exception):
    """Base class for toolkit errors."""


class DomainError(TracelabError, ValueError):
    """An argument lies outside the operation's mathematical domain."""


class CapacityError(TracelabError, ValueError):
    """A size exceeds a representation capacity (64-element masks, 2^20 colex prefix, ...)."""


class ResourceLimitError(TracelabError):
    """The request is well-defined but exceeds a hard computational limit."""


class CertificateError(TracelabError):
    """A witness family does not certify the claimed bound."""


class NoTheoremError(DomainError):
    """No closed formula covers the requested parameters."""
