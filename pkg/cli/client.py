"""
Command-line application client.
"""

import importlib
import pathlib

import click
import typer
from rich.console import Console

from cli.command import SimulatorCommand
from core.config import Settings
from core.errors import ConfigError, DivergentRegimeError, SimulatorError
from core.events import EventBus
from core.experiment import ExperimentSpec, load_config
from core.log import get_logger
from repositories import CheckpointRepository, ManifestRepository, RunDirectory, SweepRepository

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DIVERGENT = 3


class SimulatorApp:
    """
    Typer application holding the settings, event bus and services.

    Verbs come from commands/; simulator errors become exit codes.
    """

    def __init__(
        self,
        settings: Settings,
        event_bus: EventBus,
        checkpoint_repository: CheckpointRepository,
        manifest_repository: ManifestRepository,
        sweep_repository: SweepRepository,
        *,
        console: Console | None = None,
    ):
        """
        Args:
            settings: Process settings
            event_bus: Event bus for pub/sub
            checkpoint_repository: Network checkpoint storage
            manifest_repository: Manifest storage
            sweep_repository: Sweep table storage
            console: Console for result tables (stdout by default)
        """
        self.settings = settings
        self.event_bus = event_bus
        self.checkpoint_repository = checkpoint_repository
        self.manifest_repository = manifest_repository
        self.sweep_repository = sweep_repository
        self.console = console or Console()

        self.typer = typer.Typer(name="flsim", add_completion=False, no_args_is_help=True)
        self._services: dict[str, object] = {}
        self._load_commands()

    def register_service(self, service) -> None:
        """
        Register a service; commands look services up by class name.

        Args:
            service: Service instance, optionally with start()/stop()
        """
        self._services[service.__class__.__name__] = service

    def service(self, name: str):
        """Registered service by class name."""
        return self._services[name]

    def load(self, path: str | pathlib.Path) -> ExperimentSpec:
        """Load an experiment with the process settings applied."""
        return load_config(path, self.settings)

    def run_directory(self, spec: ExperimentSpec) -> RunDirectory:
        return RunDirectory(spec.output_dir)

    def run(self, args: list[str]) -> int:
        """
        Execute one CLI invocation.

        Returns:
            0 on success, 2 for configuration errors, 3 for divergent
            parameter sets, 1 for any other simulator error
        """
        for service in self._services.values():
            if hasattr(service, "start"):
                service.start()
        try:
            result = self.typer(args=args, prog_name="flsim", standalone_mode=False, obj=self)
            return result if isinstance(result, int) else EXIT_OK
        except ConfigError as e:
            logger.error("[CLI] Invalid configuration: %s", e)
            return EXIT_CONFIG
        except DivergentRegimeError as e:
            logger.error("[CLI] %s", e)
            return EXIT_DIVERGENT
        except SimulatorError as e:
            logger.error("[CLI] %s: %s", type(e).__name__, e)
            return EXIT_FAILURE
        except click.ClickException as e:
            e.show()
            return e.exit_code
        except click.exceptions.Exit as e:
            return e.exit_code
        except click.exceptions.Abort:
            return EXIT_FAILURE
        finally:
            for service in self._services.values():
                if hasattr(service, "stop"):
                    service.stop()

    def _load_commands(self) -> None:
        """Register every SimulatorCommand found in commands/*.py."""
        commands_path = pathlib.Path(__file__).parent.parent / "commands"
        if not commands_path.exists():
            logger.warning("[CLI] Commands directory not found: %s", commands_path)
            return

        for file in sorted(commands_path.glob("*.py")):
            if file.name.startswith("_"):
                continue

            mod_name = f"commands.{file.stem}"
            try:
                mod = importlib.import_module(mod_name)
            except Exception as e:
                logger.error("[CLI] Failed to load command module %s: %s", mod_name, e)
                continue

            for obj in vars(mod).values():
                if isinstance(obj, SimulatorCommand):
                    self.typer.command(name=obj.name, help=obj.help)(obj.callback)
                    logger.debug("[CLI] Loaded command: %s", obj.name)
