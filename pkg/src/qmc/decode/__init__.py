from .config import DecodeConfig, choose_config, choose_config_multi, choose_config_uni
from .interp import (InterpPoly, constraint_matrix, delta_multi, delta_uni, interpolate,
                     interpolate_multi, interpolate_uni, interpolation_residuals)
from .listdec import DecodeResult, enumerate_space, list_decode
from .solve import AffineSpace, SolveReport, dim_bound, solve, solve_multi, solve_uni

__all__ = [
    "DecodeConfig", "choose_config", "choose_config_multi", "choose_config_uni",
    "InterpPoly", "constraint_matrix", "delta_multi", "delta_uni", "interpolate",
    "interpolate_multi", "interpolate_uni", "interpolation_residuals",
    "DecodeResult", "enumerate_space", "list_decode",
    "AffineSpace", "SolveReport", "dim_bound", "solve", "solve_multi", "solve_uni",
]
