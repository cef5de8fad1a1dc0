"""Exception hierarchy shared across the package.

The CLI maps the three base classes to exit codes: InputError -> 2,
InfeasibilityError -> 1, InternalError -> 3.
"""


class EpcoordError(Exception):
    """Base class for all package errors."""


class InputError(EpcoordError):
    """The user-supplied model or program is malformed."""


class InfeasibilityError(EpcoordError):
    """A subsystem or coordination problem has no feasible solution."""


class InternalError(EpcoordError):
    """An internal consistency guarantee was violated (likely a bug)."""


# --- input-side errors -------------------------------------------------

class NumberParseError(InputError):
    pass


class MalformedProgram(InputError):
    pass


class UnknownVariable(InputError):
    pass


class MissingCoordinate(InputError):
    pass


class EmptyPolytope(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class CycleDetected(InputError):
    pass


class UnknownReference(InputError):
    pass


class DuplicateVariable(InputError):
    pass


class NonAffineTerm(InputError):
    pass


class MultipleRoots(InputError):
    pass


class InvalidModel(InputError):
    pass


class UnboundedCost(InputError):
    """A node's cost has no finite supremum; an explicit cost_bound is required."""


# --- feasibility errors ------------------------------------------------

class InfeasibleSubsystem(InfeasibilityError):
    def __init__(self, node_id, message=None):
        self.node_id = node_id
        super().__init__(message or f"subsystem '{node_id}' has an empty feasible region")


class UpperInfeasible(InfeasibilityError):
    pass


# --- internal errors ---------------------------------------------------

class InternalInconsistency(InternalError):
    pass
