"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RidgeSplitError(Exception):
    """Base class for all errors raised by ridge_split."""


# -- expressions -------------------------------------------------------------

class ExprError(RidgeSplitError):
    pass


class ParseError(ExprError, ValueError):
    """Malformed expression text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", position)


class UnknownFunctionError(ParseError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown function {name!r}", position)


class DomainError(ExprError, ArithmeticError):
    """Real-arithmetic domain violation (log of non-positive, 1/0, ...)."""


class UnboundVariableError(ExprError, LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no binding for variable {name!r}")


# -- geometry ----------------------------------------------------------------

class DirectionError(RidgeSplitError, ValueError):
    pass


class ZeroDirectionError(DirectionError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"direction {index} is the zero vector")


class DependentDirectionsError(DirectionError):
    def __init__(self, i: int, j: int, cross: float):
        self.pair = (i, j)
        self.cross = cross
        super().__init__(
            f"directions {i} and {j} are linearly dependent "
            f"(normalized cross product {cross:.3e})")


# -- calculus ----------------------------------------------------------------

class CalculusError(RidgeSplitError, ValueError):
    pass


class OutOfDomainError(CalculusError):
    """A function was evaluated outside the rectangle it is defined on."""


class SmoothnessError(CalculusError):
    pass


class DomainMarginError(CalculusError):
    pass


class ProfileRangeError(CalculusError):
    pass


class DegenerateScaleError(CalculusError):
    pass


class BackingError(CalculusError):
    """The requested operation is not supported by the function's backing."""


# -- decomposition -----------------------------------------------------------

class RepresentabilityError(RidgeSplitError):
    """The input is not (numerically) a sum of ridge functions along the directions.

    ``kind`` names the failed check ("separation", "constancy", "increment"),
    ``defect`` its measured value and ``threshold`` the bound it exceeded.
    """

    def __init__(self, kind: str, defect: float, threshold: float,
                 stage: int | None = None):
        self.kind = kind
        self.defect = float(defect)
        self.threshold = float(threshold)
        self.stage = stage
        where = f" at stage {stage}" if stage is not None else ""
        super().__init__(
            f"{kind} defect {self.defect:.3e} exceeds {self.threshold:.3e}{where}; "
            "the function is not a ridge sum along these directions")


# -- files and encodings -----------------------------------------------------

class FormatError(RidgeSplitError, ValueError):
    pass


class IngestError(FormatError):
    pass
