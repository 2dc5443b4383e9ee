"""Exception types shared across the toolkit."""


class NetcalcError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NetcalcError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnsupportedCurveOperation(NetcalcError, TypeError):
    """The requested operation is not defined for this curve shape combination."""


class TSpecError(DomainError):
    """Traffic specification parameters violate an invariant."""


class DegenerateTSpecError(TSpecError):
    """Peak rate equals sustained rate; model such a flow as a plain token bucket."""


class ScenarioError(NetcalcError, ValueError):
    """A scenario file is malformed or violates the schema."""


class UnboundedRegionError(NetcalcError):
    """The admissible count region is infinite and no ceiling was supplied."""
