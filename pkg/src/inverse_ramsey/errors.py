"""Exception types raised by the solver toolkit."""


class InverseRamseyError(Exception):
    """Base class for all toolkit errors."""

    kind = "Error"

    def to_dict(self):
        out = {"error": self.kind, "message": str(self)}
        out.update(getattr(self, "details", {}) or {})
        return out


class DomainError(InverseRamseyError, ValueError):
    """A tax rate or parameter lies outside its admissible domain."""

    kind = "DomainError"


class NoSolution(InverseRamseyError):
    """The first-order condition cannot be satisfied for the requested input."""

    kind = "NoSolution"


class Infeasible(InverseRamseyError):
    """No tax pair attains the requested revenue."""

    kind = "Infeasible"

    def __init__(self, message, max_revenue=None):
        super().__init__(message)
        self.max_revenue = max_revenue
        self.details = {"max_revenue": max_revenue}


class EmptyLocus(Infeasible):
    kind = "EmptyLocus"


class NoFeasiblePoint(Infeasible):
    kind = "NoFeasiblePoint"


class NotFound(InverseRamseyError):
    kind = "NotFound"


class BoundaryCase(InverseRamseyError):
    """Parameters sit exactly on a boundary of the case taxonomy."""

    kind = "BoundaryCase"


class Unsupported(InverseRamseyError):
    kind = "Unsupported"


class DegenerateMultiplier(InverseRamseyError):
    kind = "DegenerateMultiplier"


class ConfigError(InverseRamseyError, ValueError):
    kind = "ConfigError"
