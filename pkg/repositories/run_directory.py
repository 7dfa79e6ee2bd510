"""
Layout of one experiment's output directory.

    <root>/
        episodes.csv          per-episode metrics
        summary.csv           per-(agent, axis value) seed averages
        sweep_<axis>.csv      analytic bound sweeps, with sweep_<axis>.manifest.json
        calibration.json      fitted gap constants
        manifest.json         inputs, seeds and config hash
        checkpoints/          policy checkpoints
        plot/<kind>*.csv      plot data plus plot/manifest.json
"""

from pathlib import Path


class RunDirectory:
    """Resolves and creates the files of one run directory."""

    def __init__(self, root: str | Path):
        """
        Args:
            root: Output directory; created on demand
        """
        self._root = Path(root)

    @property
    def root(self) -> Path:
        return self._root

    def ensure(self) -> "RunDirectory":
        """Create the root and its fixed subdirectories."""
        self._root.mkdir(parents=True, exist_ok=True)
        self.checkpoints_dir.mkdir(exist_ok=True)
        return self

    @property
    def episodes_csv(self) -> Path:
        return self._root / "episodes.csv"

    @property
    def summary_csv(self) -> Path:
        return self._root / "summary.csv"

    @property
    def manifest(self) -> Path:
        return self._root / "manifest.json"

    @property
    def calibration(self) -> Path:
        return self._root / "calibration.json"

    @property
    def checkpoints_dir(self) -> Path:
        return self._root / "checkpoints"

    @property
    def plot_dir(self) -> Path:
        return self._root / "plot"

    def sweep_csv(self, axis: str) -> Path:
        return self._root / f"sweep_{axis}.csv"

    def sweep_manifest(self, axis: str) -> Path:
        return self._root / f"sweep_{axis}.manifest.json"

    def checkpoint(self, run_id: str) -> Path:
        return self.checkpoints_dir / f"{run_id}.ckpt"
