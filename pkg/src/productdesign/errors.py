"""Exception types shared across the package."""


class EmptyMarketError(ValueError):
    """A market operation received no customers."""


class DimensionMismatchError(ValueError):
    """Two objects with different quality dimensions were combined."""


class ParetoViolationError(ValueError):
    """A market contains a customer dominated by another customer.

    ``pair`` holds one witnessing ``(dominated, dominating)`` index pair.
    """

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class MarketFormatError(ValueError):
    """A customer file could not be parsed."""


class GuardExceededError(RuntimeError):
    """An instance exceeds the configured size guard of an exhaustive path."""
