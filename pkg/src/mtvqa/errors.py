"""Exception types shared across the toolkit."""


class MtvqaError(Exception):
    """Base class for all toolkit errors."""


class FormatError(MtvqaError):
    """A file or record does not match its documented format."""


class ConfigError(MtvqaError):
    """An invalid configuration value."""


class ShapeError(MtvqaError):
    """Tensor shapes inconsistent with the operator being applied."""


class TrainingError(MtvqaError):
    """Training aborted (non-finite loss, bad target, ...)."""
