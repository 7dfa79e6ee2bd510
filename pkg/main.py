"""
FL Energy Sim - federated learning energy simulator

Main entry point that wires together all components using dependency injection.
"""

import sys

from cli import SimulatorApp
from core.config import Settings
from core.events import EventBus
from core.log import get_logger, setup_logging
from repositories import CheckpointRepository, ManifestRepository, SweepRepository
from services import CalibrationService, PlotDataService, ProgressService, SweepService, TrainingService

logger = get_logger(__name__)


def create_app(settings: Settings) -> SimulatorApp:
    """Build the application with its repositories and services."""
    event_bus = EventBus()

    checkpoint_repository = CheckpointRepository()
    manifest_repository = ManifestRepository()
    sweep_repository = SweepRepository()

    app = SimulatorApp(
        settings=settings,
        event_bus=event_bus,
        checkpoint_repository=checkpoint_repository,
        manifest_repository=manifest_repository,
        sweep_repository=sweep_repository,
    )

    app.register_service(ProgressService(event_bus))
    app.register_service(SweepService(event_bus, sweep_repository, manifest_repository))
    app.register_service(CalibrationService())
    app.register_service(
        TrainingService(event_bus, checkpoint_repository, manifest_repository, workers=settings.workers)
    )
    app.register_service(PlotDataService(manifest_repository, sweep_repository))
    return app


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI."""
    settings = Settings.from_env()
    setup_logging(settings.log_level)
    app = create_app(settings)
    return app.run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
