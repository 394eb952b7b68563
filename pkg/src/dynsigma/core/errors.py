EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_MAP = 2
EXIT_RESOURCE = 3
EXIT_DOMAIN = 4


class DynSigmaError(Exception):
    exit_code = EXIT_USAGE


class UsageError(DynSigmaError):
    exit_code = EXIT_USAGE


class ConfigError(DynSigmaError):
    exit_code = EXIT_USAGE


class PolynomialParseError(DynSigmaError, ValueError):
    exit_code = EXIT_USAGE


class DocumentError(DynSigmaError):
    exit_code = EXIT_USAGE


class VariableMismatchError(DynSigmaError, ValueError):
    exit_code = EXIT_USAGE


class PolynomialError(DynSigmaError, ValueError):
    """Contract violation in polynomial arithmetic (negative power, unknown variable, ...)."""

    exit_code = EXIT_USAGE


class InvalidMapError(DynSigmaError):
    exit_code = EXIT_INVALID_MAP


class NotAMorphismError(InvalidMapError):
    pass


class ResourceLimitError(DynSigmaError):
    exit_code = EXIT_RESOURCE


class DomainError(DynSigmaError):
    exit_code = EXIT_DOMAIN


class IrrationalSpectrumError(DomainError):
    pass


class MultiplierOneError(DomainError):
    pass


class IncompleteSpectrumError(DomainError):
    pass


class DegenerateChartError(DomainError):
    pass


class StructuralInvariantError(DomainError):
    pass


class NotPeriodicError(DomainError):
    pass


class SingularMatrixError(DomainError):
    pass
