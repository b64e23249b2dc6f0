"""
Helpers module - Reusable utilities for the GI event toolkit.

Contains:
- Structured logging (loguru-backed)
- Run-length helpers over boolean frame masks
- Video id extraction from file names
"""

import datetime
import sys
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from loguru import logger


# ============================================================================
# STRUCTURED LOGGING
# ============================================================================

_LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> "
    "[<cyan>{extra[node]}</cyan>] "
    "<level>{level}</level>: {message}"
)

logger.configure(extra={"node": "-"})


def configure_logging(level: str = "INFO") -> None:
    """
    Install a single stderr sink for the toolkit.

    stdout is left free for reports so command output stays deterministic.
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=_LOG_FORMAT)


class StructuredLogger:
    """
    Structured logger that captures logs with timestamps and context.

    Stores logs in a list for inclusion in pipeline state while also
    emitting them through loguru for real-time visibility.
    """

    def __init__(self, node_name: str):
        self.node_name = node_name
        self.logs: List[str] = []
        self._sink = logger.bind(node=node_name)

    def _format(self, level: str, message: str) -> str:
        timestamp = datetime.datetime.now().strftime("%H:%M:%S")
        return f"[{timestamp}] [{self.node_name}] {level}: {message}"

    def info(self, message: str) -> None:
        self._sink.info(message)
        self.logs.append(self._format("INFO", message))

    def warning(self, message: str) -> None:
        self._sink.warning(message)
        self.logs.append(self._format("WARN", message))

    def error(self, message: str) -> None:
        self._sink.error(message)
        self.logs.append(self._format("ERROR", message))

    def success(self, message: str) -> None:
        self._sink.success(message)
        self.logs.append(self._format("OK", message))

    def debug(self, message: str) -> None:
        # Debug only to the sink, not stored
        self._sink.debug(message)

    def get_logs(self) -> List[str]:
        """Get all captured logs."""
        return self.logs


# ============================================================================
# FRAME RUN HELPERS
# ============================================================================

def boolean_runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """
    Find maximal runs of True in a 1-D boolean mask.

    Args:
        mask: 1-D array interpreted as booleans

    Returns:
        List of (start, end) pairs, both inclusive, in frame order
    """
    flags = np.asarray(mask, dtype=bool).ravel()
    if flags.size == 0:
        return []
    padded = np.concatenate(([False], flags, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def value_runs(values: np.ndarray) -> List[Tuple[int, int]]:
    """
    Split a sequence into maximal runs of equal rows.

    Works on 1-D label vectors and on 2-D matrices (rows compared whole).

    Returns:
        List of (start, end) pairs, both inclusive, covering every frame
    """
    arr = np.asarray(values)
    n = arr.shape[0]
    if n == 0:
        return []
    if arr.ndim == 1:
        changed = arr[1:] != arr[:-1]
    else:
        changed = np.any(arr[1:] != arr[:-1], axis=tuple(range(1, arr.ndim)))
    cuts = np.flatnonzero(changed) + 1
    starts = np.concatenate(([0], cuts))
    ends = np.concatenate((cuts - 1, [n - 1]))
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


# ============================================================================
# NAMING
# ============================================================================

_ROLE_SUFFIXES = ("_probs", "_scores", "_logits", "_labels", "_gt", "_pred")


def video_id_from_path(path: Union[str, Path]) -> str:
    """
    Derive a video id from a stream or event file name.

    Args:
        path: File path such as 'out/ukdd_navi_00051_probs.csv'

    Returns:
        Video id with the role suffix removed (e.g. 'ukdd_navi_00051')
    """
    stem = Path(path).stem
    for suffix in _ROLE_SUFFIXES:
        if stem.endswith(suffix) and len(stem) > len(suffix):
            stem = stem[: -len(suffix)]
            break
    return stem or "unknown"
