"""Reference solutions, decomposition, norms and convergence measurement."""

from .convergence import ConvergenceTable, ErrorRow, fit_rates, fit_slopes, measure_errors, worst_case
from .decomposition import Decomposition, decompose_const
from .norms import norm_energy, norm_l2, norm_weighted_L2, weight
from .reference import ReferenceSolution, closed_form_const, fine_grid_oracle, reference_for

__all__ = [
    "ConvergenceTable", "ErrorRow", "fit_rates", "fit_slopes", "measure_errors", "worst_case",
    "Decomposition", "decompose_const", "norm_energy", "norm_l2", "norm_weighted_L2", "weight",
    "ReferenceSolution", "closed_form_const", "fine_grid_oracle", "reference_for",
]
