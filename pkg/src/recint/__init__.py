"""Power-series solutions of linear ODEs by recursion and generalized integrating factors."""
from .errors import (
    InvalidParameterError,
    IterationLimitError,
    NumericRangeError,
    RecintError,
    SeriesMismatchError,
    SingularBasePointError,
)
from .first_order import (
    FirstOrderProblem,
    ResidualReport,
    residual_first_order,
    solve_integrating_factor,
    solve_recursive,
)
from .second_order import (
    FactorBundle,
    SecondOrderProblem,
    SolutionBundle,
    residual_second_order,
    solve,
    wronskian,
)
from .series import Series

__version__ = "0.1.0"

__all__ = [
    "FactorBundle",
    "FirstOrderProblem",
    "InvalidParameterError",
    "IterationLimitError",
    "NumericRangeError",
    "RecintError",
    "ResidualReport",
    "SecondOrderProblem",
    "Series",
    "SeriesMismatchError",
    "SingularBasePointError",
    "SolutionBundle",
    "residual_first_order",
    "residual_second_order",
    "solve",
    "solve_integrating_factor",
    "solve_recursive",
    "wronskian",
]
