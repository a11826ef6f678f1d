"""Exception types shared across the package.

Each error maps to one CLI exit code (see ``pcfgeom.cli``).
"""


class PcfGeomError(Exception):
    exit_code = 1


class ContractError(PcfGeomError, ValueError):
    """An input violated a documented precondition."""

    exit_code = 2


class PreconditionError(ContractError):
    """The requested quantity is undefined for this input (e.g. z inside M)."""


class DegeneracyError(ContractError):
    """Points impose dependent constraints, so no unique curve exists."""


class ResourceError(PcfGeomError):
    """A precision ceiling, iteration cap or size budget was exhausted."""

    exit_code = 3

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class IntegrityError(PcfGeomError):
    """Stored data failed re-verification."""

    exit_code = 4


class ParseError(IntegrityError):
    """Malformed input file; the message names the offending field."""


class InexactDivisionError(PcfGeomError, ArithmeticError):
    def __init__(self, msg, remainder_degree):
        super().__init__(msg)
        self.remainder_degree = remainder_degree
