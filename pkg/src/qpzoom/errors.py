class QPZoomError(Exception):
    """Base class for errors raised by qpzoom."""


class InvalidArgumentError(QPZoomError, ValueError):
    pass


class OutOfDomainError(QPZoomError, ValueError):
    """A point or box lies outside the domain of a coordinate map."""


class SolverError(QPZoomError, ArithmeticError):
    """The KKT system could not be factorized."""


class DegenerateDeformationError(QPZoomError, ArithmeticError):
    """The solved grid has a non-positive interval.

    ``axis`` is ``"row"`` or ``"col"`` and ``index`` the 0-based offending entry.
    """

    def __init__(self, axis: str, index: int, value: float):
        self.axis = axis
        self.index = index
        self.value = value
        super().__init__(f"non-positive {axis} interval at index {index}: {value!r}")
