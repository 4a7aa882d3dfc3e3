"""Decompose bivariate functions into sums of smooth ridge functions.

A function that is a sum of ridge functions ``g_i(a_i x + b_i y)``, with
arbitrary (even wild) profiles, is rebuilt from smooth sampled profiles along
the same directions. A companion module builds and checks plane-wave
solutions of factored constant-coefficient operators.
"""

from .calculus import (BivariateFunction, CallableFunction, ExprFunction, GridFunction,
                       Rect, RidgeSumFunction, RidgeTerm, SampledProfile, antiderivative,
                       increment, mixed_directional_derivative, profile_eval, ridge_grid)
from .decompose import (Decomposition, decompose, decompose_small_n, extract_ridge_profile,
                        reconstruct, representability_defect, separation_defect)
from .errors import (
    RidgeSplitError, ExprError, ParseError, UnknownIdentifierError, UnknownFunctionError,
    DomainError, UnboundVariableError, DirectionError, ZeroDirectionError,
    DependentDirectionsError, CalculusError, OutOfDomainError, SmoothnessError,
    DomainMarginError, ProfileRangeError, DegenerateScaleError, BackingError,
    RepresentabilityError, FormatError, IngestError)
from .expr import Expr, diff, evaluate, parse, serialize, substitute
from .fileio import (ingest_samples, read_decomposition, write_decomposition,
                     write_plot_data, write_samples)
from .geometry import (Direction, DirectionSet, normalize, normalized_cross,
                       perpendicular_unit, select_axis_pair, validate_directions)
from .pde import (PlaneWaveOperator, apply_operator, corollary_check, plane_wave_solution,
                  verify_solution, wave_directions)

__version__ = "0.1.0"

__all__ = [
    "BivariateFunction",
    "CallableFunction",
    "ExprFunction",
    "GridFunction",
    "Rect",
    "RidgeSumFunction",
    "RidgeTerm",
    "SampledProfile",
    "antiderivative",
    "increment",
    "mixed_directional_derivative",
    "profile_eval",
    "ridge_grid",
    "Decomposition",
    "decompose",
    "decompose_small_n",
    "extract_ridge_profile",
    "reconstruct",
    "representability_defect",
    "separation_defect",
    "RidgeSplitError",
    "ExprError",
    "ParseError",
    "UnknownIdentifierError",
    "UnknownFunctionError",
    "DomainError",
    "UnboundVariableError",
    "DirectionError",
    "ZeroDirectionError",
    "DependentDirectionsError",
    "CalculusError",
    "OutOfDomainError",
    "SmoothnessError",
    "DomainMarginError",
    "ProfileRangeError",
    "DegenerateScaleError",
    "BackingError",
    "RepresentabilityError",
    "FormatError",
    "IngestError",
    "Expr",
    "diff",
    "evaluate",
    "parse",
    "serialize",
    "substitute",
    "ingest_samples",
    "read_decomposition",
    "write_decomposition",
    "write_plot_data",
    "write_samples",
    "Direction",
    "DirectionSet",
    "normalize",
    "normalized_cross",
    "perpendicular_unit",
    "select_axis_pair",
    "validate_directions",
    "PlaneWaveOperator",
    "apply_operator",
    "corollary_check",
    "plane_wave_solution",
    "verify_solution",
    "wave_directions",
]
