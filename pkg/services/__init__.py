"""
Services module containing the experiment workflows.
"""

from .sweep_service import SweepService, bound_sweep_rows
from .calibration_service import CalibrationService, CalibrationResult, calibrate_gap_constants, load_targets
from .training_service import TrainingService, TrainingOutcome, plan_jobs
from .plot_data_service import PlotDataService, PLOT_KINDS
from .progress_service import ProgressService

__all__ = [
    "SweepService",
    "bound_sweep_rows",
    "CalibrationService",
    "CalibrationResult",
    "calibrate_gap_constants",
    "load_targets",
    "TrainingService",
    "TrainingOutcome",
    "plan_jobs",
    "PlotDataService",
    "PLOT_KINDS",
    "ProgressService",
]
