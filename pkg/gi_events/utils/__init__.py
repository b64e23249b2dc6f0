"""Utility functions, helpers, and constants."""

from gi_events.utils.helpers import (
    StructuredLogger,
    boolean_runs,
    configure_logging,
    value_runs,
    video_id_from_path,
)

__all__ = [
    "StructuredLogger",
    "configure_logging",
    "boolean_runs",
    "value_runs",
    "video_id_from_path",
]
