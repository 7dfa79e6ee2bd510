"""
Calibration of the information-usage constants (c0, c1).

Each target (k, I_glob) pins the information usage y = c0*exp(-c1*k*tau)
that makes the bound hit I_glob with H_pz held fixed; the bound grows
monotonically in y, so y is found by bisection. A least-squares line
through (k*tau, ln y) then gives ln c0 and -c1.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import orjson

from convergence import GapParams, global_iteration_bound
from core.errors import CalibrationError, DivergentRegimeError, DomainError
from core.experiment import ExperimentSpec
from core.log import get_logger
from repositories import RunDirectory

logger = get_logger(__name__)

MAX_RESIDUAL = 0.5
_BISECTION_STEPS = 200


@dataclass(frozen=True)
class CalibrationResult:
    c0: float
    c1: float
    targets: list[tuple[float, float]]
    fitted: list[float]

    @property
    def residuals(self) -> list[float]:
        return [abs(f - t) for (_, t), f in zip(self.targets, self.fitted)]


def load_targets(path: str | Path) -> list[tuple[float, float]]:
    """
    Read (k, global_iterations) pairs from a CSV with that header.

    Raises:
        CalibrationError: Missing columns or non-numeric values
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            return [(float(row["k"]), float(row["global_iterations"])) for row in reader]
    except (OSError, KeyError, ValueError, TypeError) as e:
        raise CalibrationError(f"cannot read targets from {path}: {e}") from e


def _bound_at_usage(spec: ExperimentSpec, usage: float) -> float:
    """Real-valued bound when the information usage equals `usage` (inf if divergent)."""
    gap = spec.gap.model_copy(update={"c0": usage})
    try:
        return global_iteration_bound(spec.learning, gap, 0.0, spec.network.tau, spec.network.num_users)
    except DivergentRegimeError:
        return math.inf


def _solve_usage(spec: ExperimentSpec, target: float) -> float:
    lo, hi = 0.0, spec.gap.H_pz
    floor = _bound_at_usage(spec, lo)
    ceiling = _bound_at_usage(spec, hi)
    if not floor <= target < ceiling:
        raise CalibrationError(
            f"I_glob={target:g} is unreachable: with H_pz={spec.gap.H_pz:g} the bound spans "
            f"[{floor:.6g}, {ceiling:.6g})"
        )
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _bound_at_usage(spec, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi)


def calibrate_gap_constants(targets: list[tuple[float, float]], spec: ExperimentSpec) -> CalibrationResult:
    """
    Fit (c0, c1) so the bound reproduces the target iteration counts.

    Args:
        targets: (k, I_glob) pairs with at least two distinct k
        spec: Experiment whose other constants stay fixed

    Raises:
        CalibrationError: Too few points, unreachable targets, or a residual of 0.5 iterations or more
    """
    if len({k for k, _ in targets}) < 2:
        raise CalibrationError("at least two target points with distinct k are required")
    tau = spec.network.tau

    usages = np.array([_solve_usage(spec, target) for _, target in targets])
    if np.any(usages <= 0):
        raise CalibrationError("a target requires zero information usage")
    x = np.array([k * tau for k, _ in targets])
    slope, intercept = np.polyfit(x, np.log(usages), 1)
    c0, c1 = float(np.exp(intercept)), float(-slope)
    if c1 <= 0:
        raise CalibrationError(f"targets imply a non-decaying information usage (c1={c1:.6g})")

    try:
        gap = GapParams(**{**spec.gap.model_dump(), "c0": c0, "c1": c1})
        fitted = [
            global_iteration_bound(spec.learning, gap, k, tau, spec.network.num_users) for k, _ in targets
        ]
    except (DivergentRegimeError, DomainError, ValueError) as e:
        raise CalibrationError(f"fitted constants c0={c0:.6g}, c1={c1:.6g} are unusable: {e}") from e

    result = CalibrationResult(c0=c0, c1=c1, targets=list(targets), fitted=fitted)
    worst = max(result.residuals)
    if worst >= MAX_RESIDUAL:
        raise CalibrationError(f"fit residual {worst:.3g} iterations exceeds {MAX_RESIDUAL}")
    return result


class CalibrationService:
    """Runs calibrations and stores the fitted constants."""

    def calibrate(self, spec: ExperimentSpec, targets_path: str | Path, run_dir: RunDirectory) -> CalibrationResult:
        targets = load_targets(targets_path)
        result = calibrate_gap_constants(targets, spec)
        run_dir.ensure()
        payload = {
            "c0": result.c0,
            "c1": result.c1,
            "H_pz": spec.gap.H_pz,
            "tau": spec.network.tau,
            "config_hash": spec.config_hash(),
            "targets": [{"k": k, "global_iterations": t, "fitted": f} for (k, t), f in zip(result.targets, result.fitted)],
        }
        run_dir.calibration.write_bytes(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2))
        logger.info("[CalibrationService] c0=%.6g c1=%.6g (max residual %.3g)", result.c0, result.c1, max(result.residuals))
        return result
