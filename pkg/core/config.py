"""
Process-level settings loaded from the environment.

Experiment parameters live in YAML files (see core.experiment); this module
only covers knobs that change how a run is executed, not what it computes.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv


@dataclass
class Settings:
    """Process settings loaded from environment variables."""

    output_dir: str | None
    log_level: str
    workers: int

    @classmethod
    def from_env(cls) -> "Settings":
        """Load settings from environment variables (and a .env file if present)."""
        load_dotenv()

        # Optional, overrides the experiment file's output_dir
        output_dir = os.getenv("FLSIM_OUTPUT_DIR") or None

        log_level = os.getenv("FLSIM_LOG_LEVEL", "INFO").upper()

        try:
            workers = int(os.getenv("FLSIM_WORKERS", "1"))
        except ValueError:
            workers = 1

        return cls(
            output_dir=output_dir,
            log_level=log_level,
            workers=max(1, workers),
        )
