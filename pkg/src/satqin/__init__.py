"""Performance model of a satellite-enabled quantum information network.

Entangled pairs are distributed from a LEO satellite to two ground stations
and relayed through metropolitan fiber links with multimode memories and
Bell state measurements to two trapped-ion end users.
"""

from satqin.errors import ConfigurationError, DomainError

__version__ = "0.1.0"

__all__ = ["ConfigurationError", "DomainError", "__version__"]
