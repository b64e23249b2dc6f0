"""Toolkit exception hierarchy."""


class GIEventsError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatchError(GIEventsError, ValueError):
    """Matrices, tracks or weight vectors disagree in shape."""


class StreamValidationError(GIEventsError, ValueError):
    """A probability / label stream violates its invariants."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class ConfigError(GIEventsError, ValueError):
    """Run configuration, label space or gating prior is invalid."""


class EventFileError(GIEventsError, ValueError):
    """An event document is malformed or violates EventSet invariants."""


class EvaluationError(GIEventsError, ValueError):
    """Prediction and ground-truth sets cannot be evaluated together."""
