"""
Exception hierarchy shared by every layer of the simulator.
"""


class SimulatorError(Exception):
    """Base class for all simulator errors."""


class DomainError(SimulatorError, ValueError):
    """A numeric argument lies outside the domain of a model formula."""


class StructuralError(SimulatorError):
    """Array shapes or layer dimensions do not line up."""


class ConfigError(SimulatorError):
    """
    An experiment file failed to parse or validate.

    Attributes:
        field: Dotted path of the offending field, if known
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class DivergentRegimeError(SimulatorError):
    """
    The global-iteration bound is evaluated outside its contractive regime.

    Attributes:
        parameters: Parameter values that produced the non-positive denominator
    """

    def __init__(self, message: str, parameters: dict[str, float] | None = None):
        self.parameters = dict(parameters or {})
        if self.parameters:
            detail = ", ".join(f"{k}={v:.6g}" for k, v in self.parameters.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class CalibrationError(SimulatorError):
    """Gap constants cannot be fitted to the requested targets."""


class CheckpointError(SimulatorError):
    """A checkpoint file is malformed or fails its checksum."""


class EmptyInputError(SimulatorError):
    """An operation that needs records was given none."""
