"""Exception hierarchy shared by all wrapcorr modules.

Two broad classes matter to callers (and to the CLI exit codes):
``InputError`` for bad user input or configuration, and ``NumericalError``
for failures of the computation itself (degenerate scales, singular
matrices, non-converging solvers).
"""


class WrapcorrError(Exception):
    """Base class for all wrapcorr exceptions."""


class InputError(WrapcorrError):
    """Invalid input data or arguments (CLI exit code 1)."""


class ConfigurationError(InputError):
    """An object was used before it was fully configured (e.g. an
    unsolved wrapping transform)."""


class UnsupportedInputError(InputError):
    """Input is structurally valid but not supported by the requested
    operation (e.g. missing values fed to a rank transform)."""


class NumericalError(WrapcorrError):
    """A numerical computation failed (CLI exit code 2)."""


class ZeroScaleError(NumericalError):
    """A column has zero robust scale; every downstream correlation would
    be meaningless, so this is a hard error."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"zero robust scale (MAD) in column {column!r}")


class ZeroVarianceError(NumericalError):
    """A transformed column is constant, so its correlation is undefined."""


class SingularMatrixError(NumericalError):
    """A scatter matrix is numerically singular."""

    def __init__(self, condition_number: float):
        self.condition_number = condition_number
        super().__init__(
            "scatter matrix is numerically singular "
            f"(condition number {condition_number:.3e})"
        )


class SolverError(NumericalError):
    """A root-finding or fixed-point solver failed to converge."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (last residual {residual:.3e})"
        super().__init__(message)
