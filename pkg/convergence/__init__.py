"""
Generalization-gap model and analytic convergence bounds.
"""

from .params import LearningParams, GapParams
from .bounds import (
    information_usage,
    local_gap_bound,
    global_gap_bound,
    psi,
    local_iteration_bound,
    local_iterations,
    global_iteration_bound,
    global_iterations,
    contraction_factor,
    loss_gap_curve,
)

__all__ = [
    "LearningParams",
    "GapParams",
    "information_usage",
    "local_gap_bound",
    "global_gap_bound",
    "psi",
    "local_iteration_bound",
    "local_iterations",
    "global_iteration_bound",
    "global_iterations",
    "contraction_factor",
    "loss_gap_curve",
]
