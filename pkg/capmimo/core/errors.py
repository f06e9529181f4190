"""Exception hierarchy for the CAP-MIMO pattern design library"""


class CapMimoError(Exception):
    """Base class for all library errors"""


class InvalidConfigError(CapMimoError, ValueError):
    """Invalid scenario parameters, unknown keys or unparsable config files"""


class SingularityError(InvalidConfigError):
    """Evaluation point closer to a source point than the kernel guard allows"""


class ContractError(CapMimoError, ValueError):
    """Arguments whose shapes or index sets do not line up"""


class NumericError(CapMimoError, ArithmeticError):
    """Numerical breakdown: singular systems, zero MSE, runaway multipliers"""


class OptimizerError(NumericError):
    """The power multiplier search could not produce a feasible solution"""


class OracleInconclusiveError(CapMimoError):
    """A verification oracle cannot produce a trustworthy answer for its inputs"""
