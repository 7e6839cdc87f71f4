"""Exception hierarchy shared across the package."""


class UnliError(Exception):
    """Base error for this package."""


class DomainError(UnliError, ValueError):
    """An input violates a mathematical precondition (NaN, sigma <= 0, |rho| >= 1, ...)."""


class TrialParseError(UnliError, ValueError):
    """A trial CSV file violates the expected schema; message carries line numbers."""
