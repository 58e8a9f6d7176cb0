"""
Error taxonomy.

Numerical failures derive from ArithmeticError, bad inputs from ValueError, so
callers that only know the builtin hierarchy still catch them sensibly. The CLI
maps InputError to exit code 2 and NumericalError to exit code 3.
"""


class VarCheckError(Exception):
    """Root of every error raised by varcheck."""


class NumericalError(VarCheckError, ArithmeticError):
    """A computation could not be carried out reliably."""


class InputError(VarCheckError, ValueError):
    """Arguments or data violate a precondition."""


# matnum
class NotSymmetric(NumericalError):
    pass


class IndefiniteMatrix(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


# estimators / portmanteau
class SingularDesign(NumericalError):
    pass


class SingularGamma0(NumericalError):
    pass


# vol_kernel
class DegenerateKernel(NumericalError):
    """Every kernel weight vanished for some t (compact kernel, tiny bandwidth)."""


# quadform
class ConvergenceFailure(NumericalError):
    pass


# diagnostics
class EigenvalueOutOfRange(NumericalError):
    """An assembled covariance has eigenvalues far outside their theoretical range."""


# var_model
class OrderZero(InputError):
    pass


class InvalidBreakDate(InputError):
    pass


class NonPositiveVariance(InputError):
    pass


class UnstableModel(InputError):
    pass


# theory_oracles
class UnstableAlternative(InputError):
    pass


# diagnostics / vol_kernel
class LagTooLarge(InputError):
    pass


class EmptyGrid(InputError):
    pass


# cli
class DatasetError(InputError):
    """Dataset file missing, malformed, non-numeric or with missing values."""
