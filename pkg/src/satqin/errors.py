"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised for invalid model parameters or scenario values."""


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""
