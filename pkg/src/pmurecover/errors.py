"""Exception hierarchy shared by every module.

Each error carries an ``exit_code`` used by the command-line interface.
"""


class PmuRecoverError(Exception):
    exit_code = 1


class ParameterError(PmuRecoverError, ValueError):
    exit_code = 2


class ShapeError(ParameterError):
    pass


class UndefinedMetricError(PmuRecoverError, ValueError):
    """Raised when MAE is requested but nothing is missing."""

    exit_code = 3


class DegenerateInputError(PmuRecoverError, ValueError):
    exit_code = 3


class DivergenceError(PmuRecoverError, ArithmeticError):
    exit_code = 4


class MatrixFileError(PmuRecoverError, OSError):
    exit_code = 5


class RaggedRowsError(MatrixFileError):
    pass


class NonNumericTokenError(MatrixFileError):
    pass


class MaskShapeError(MatrixFileError):
    pass


class MaskValueError(MatrixFileError):
    pass
