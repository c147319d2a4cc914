"""
Exception hierarchy for the instance generator.

Every error raised on purpose by the tool derives from ReqgenError, so the
command line can report it as one line and exit non-zero. Each class also
derives from the closest builtin so callers catching ValueError / KeyError
keep working.
"""

from typing import Iterable, Optional, Sequence


class ReqgenError(Exception):
    """Base class for all errors raised by the instance generator."""


# --------------------------------------------------------------------------- config


class ConfigError(ReqgenError, ValueError):
    """Invalid instance configuration."""


class ConfigSyntaxError(ConfigError):
    """The configuration text is not well-formed JSON."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownItemError(ConfigError):
    def __init__(self, item: str, where: str = "configuration"):
        super().__init__(f"Unknown item '{item}' in {where}")
        self.item = item


class TypeMismatchError(ConfigError):
    def __init__(self, item: str, expected: str, got: object):
        super().__init__(f"Item '{item}' must be {expected}, got {type(got).__name__}: {got!r}")
        self.item = item


class MissingFieldError(ConfigError):
    def __init__(self, field: str, where: str):
        super().__init__(f"Missing field '{field}' in {where}")
        self.field = field


class UnknownUnitError(ConfigError):
    def __init__(self, unit: str, dimension: str):
        super().__init__(f"Unknown {dimension} unit '{unit}'")
        self.unit = unit


class OutOfBoundsError(ConfigError):
    def __init__(self, name: str, lon: float, lat: float):
        super().__init__(f"Place '{name}' at ({lon}, {lat}) lies outside the network bounds")
        self.name = name


class UnresolvedReferenceError(ConfigError):
    def __init__(self, name: str, where: str):
        super().__init__(f"Name '{name}' referenced in {where} is not declared")
        self.name = name


class CyclicDependencyError(ConfigError):
    def __init__(self, cycle: Sequence[str]):
        super().__init__(f"Cyclic dependency between attributes: {' -> '.join(cycle)}")
        self.cycle = list(cycle)


class DuplicateNameError(ConfigError):
    def __init__(self, name: str):
        super().__init__(f"Name '{name}' is declared more than once")
        self.name = name


class ReservedNameError(ConfigError):
    def __init__(self, name: str):
        super().__init__(f"'{name}' is a reserved name and cannot be redefined here")
        self.name = name


# ----------------------------------------------------------------------------- expr


class ExpressionError(ReqgenError):
    """Base class for expression parsing and evaluation errors."""


class ExpressionSyntaxError(ExpressionError, ValueError):
    def __init__(self, text: str, offset: int, detail: str = "unexpected input"):
        super().__init__(f"Syntax error at offset {offset} in '{text}': {detail}")
        self.text = text
        self.offset = offset


class UnboundIdentifierError(ExpressionError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"Identifier '{self.name}' is not bound"


class ExpressionTypeError(ExpressionError, TypeError):
    pass


class DivisionByZeroError(ExpressionError, ZeroDivisionError):
    pass


class UnknownFunctionError(ExpressionError, NameError):
    def __init__(self, name: str):
        super().__init__(f"Unknown function '{name}'")
        self.name = name


# -------------------------------------------------------------------------- network


class NetworkError(ReqgenError):
    """Base class for network loading and query errors."""


class NetworkParseError(NetworkError, ValueError):
    pass


class MissingAttributeError(NetworkError, ValueError):
    def __init__(self, attribute: str, element: str):
        super().__init__(f"Missing attribute '{attribute}' on {element}")
        self.attribute = attribute


class EmptyNetworkError(NetworkError, ValueError):
    pass


class InvalidDimensionError(NetworkError, ValueError):
    pass


class UnknownNodeError(NetworkError, KeyError):
    def __init__(self, node: object):
        super().__init__(node)
        self.node = node

    def __str__(self) -> str:
        return f"Node {self.node!r} is not in the network"


class UnreachableError(NetworkError):
    def __init__(self, source: object, target: object):
        super().__init__(f"Node {target!r} is unreachable from {source!r}")
        self.source = source
        self.target = target


# ------------------------------------------------------------------------- sampling


class SamplingError(ReqgenError, ValueError):
    pass


class InvalidParamsError(SamplingError):
    pass


class LengthMismatchError(SamplingError):
    def __init__(self, items: int, weights: int):
        super().__init__(f"{weights} weights given for {items} items")


class AllZeroWeightsError(SamplingError):
    def __init__(self):
        super().__init__("All weights are zero")


# ------------------------------------------------------------------------ generator


class GenerationError(ReqgenError):
    pass


class InfeasibleConfigError(GenerationError):
    def __init__(self, failures: int, last_violations: Optional[Iterable[str]] = None):
        detail = ""
        if last_violations:
            detail = f"; last violated: {', '.join(last_violations)}"
        super().__init__(
            f"Unable to meet the configuration requirements after {failures} discarded requests{detail}"
        )
        self.failures = failures


class DegeneratePoiIndexError(GenerationError, ValueError):
    pass


class PlacementFailureError(GenerationError):
    pass


# -------------------------------------------------------------------------- metrics


class MetricsError(ReqgenError, ValueError):
    pass


class TooFewRequestsError(MetricsError):
    pass


class UnsortedInputError(MetricsError):
    pass


class NegativeReactionTimeError(MetricsError):
    pass


class EmptyInstanceError(MetricsError):
    pass


class MissingRequestAttributeError(MetricsError):
    def __init__(self, attribute: str, request: object):
        super().__init__(f"Request {request!r} has no attribute '{attribute}'")
        self.attribute = attribute


# ----------------------------------------------------------------------- similarity


class SizeMismatchError(ReqgenError, ValueError):
    def __init__(self, left: int, right: int):
        super().__init__(f"Instances must have the same size, got {left} and {right}")
