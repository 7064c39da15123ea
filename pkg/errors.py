"""
Exception hierarchy for the reduction toolkit.
Errors describing bad input also derive from ValueError, the way Config.validate signals problems.
"""

from typing import Optional


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class InfeasibleParameters(ToolkitError, ValueError):
    """No construction exists for the requested parameters."""


class TooLarge(ToolkitError):
    """An oracle or construction would exceed the configured enumeration budget."""

    def __init__(self, what: str, attempted: int, limit: int):
        self.what = what
        self.attempted = attempted
        self.limit = limit
        super().__init__(f"{what}: {attempted} candidates exceed the budget of {limit}")


class BudgetExceeded(TooLarge):
    """A verification pipeline ran out of budget; a partial report may exist."""

    def __init__(self, what: str, attempted: int, limit: int, report=None):
        super().__init__(what, attempted, limit)
        self.report = report


class EmptyConstraint(ToolkitError, ValueError):
    """A 2CSP edge allows no label pair."""

    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"edge {edge} has an empty constraint set")


class NotSatisfying(ToolkitError, ValueError):
    """An assignment violates at least one edge."""

    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"assignment violates edge {edge}")


class NotASolution(ToolkitError, ValueError):
    """A vector does not solve Ax = y."""


class ZeroTarget(ToolkitError, ValueError):
    """Composition requires nonzero target vectors."""


class ParameterTooSmall(ToolkitError, ValueError):
    """The instance parameter is below the amplification precondition."""


class EmptyWindow(ToolkitError, ValueError):
    """No admissible a'/b' ratio exists for the gadget parameters."""


class DimensionMismatch(ToolkitError, ValueError):
    """Operand shapes do not fit together."""


class WrongNorm(ToolkitError, ValueError):
    """The operation is only defined for a different lp norm."""


class IllegalEdge(ToolkitError, ValueError):
    """The requested reduction is not an edge of the reduction graph."""

    def __init__(self, kind_from: str, kind_to: str):
        self.kind_from = kind_from
        self.kind_to = kind_to
        super().__init__(f"no reduction from '{kind_from}' to '{kind_to}'")


class InstanceFormatError(ToolkitError, ValueError):
    """An instance file or DIMACS input could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class SizeOverflow(ToolkitError):
    """A lattice is too large to materialize; the feasibility report is attached."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
