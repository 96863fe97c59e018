class EngsetError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(EngsetError, ValueError):
    pass


class DomainError(EngsetError, ValueError):
    """Argument outside the domain where the map is defined."""


class InvalidParametersError(EngsetError, ValueError):
    """Hypergeometric parameters for which the terminating series is undefined."""


class UnsupportedParametersError(EngsetError, ValueError):
    """Parameters whose series does not terminate."""


class CoefficientOverflowError(EngsetError, OverflowError):
    pass
