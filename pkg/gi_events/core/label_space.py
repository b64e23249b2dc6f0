"""
Label space - loading the 17-class universe and validating probability streams.

Contains:
- load_label_space / label_space_from_document: JSON label-space files
- validate_stream: verdict listing every invariant violation by position
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from gi_events.core.errors import ConfigError, StreamValidationError
from gi_events.core.schemas import LabelSpace, ProbabilityStream

_MAX_REPORTED_VIOLATIONS = 5


class StreamVerdict(BaseModel):
    """Outcome of validate_stream."""

    video_id: str
    frame_count: int
    violations: List[str] = []

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_for_errors(self) -> None:
        if self.ok:
            return
        shown = "; ".join(self.violations[:_MAX_REPORTED_VIOLATIONS])
        more = len(self.violations) - _MAX_REPORTED_VIOLATIONS
        suffix = f" (+{more} more)" if more > 0 else ""
        raise StreamValidationError(
            f"stream '{self.video_id}' is invalid: {shown}{suffix}", self.violations
        )


def validate_stream(stream: ProbabilityStream, space: LabelSpace) -> StreamVerdict:
    """
    Check a probability stream against the label space.

    Args:
        stream: Stream to check
        space: Label space providing the expected width and column names

    Returns:
        StreamVerdict; violations cite row index and column name
    """
    probs = stream.probs
    width = probs.shape[1]
    if width != space.num_classes:
        return StreamVerdict(
            video_id=stream.video_id,
            frame_count=stream.frame_count,
            violations=[f"row width {width} != {space.num_classes}"],
        )

    violations = []
    names = space.class_names
    non_finite = ~np.isfinite(probs)
    out_of_range = ~non_finite & ((probs < 0.0) | (probs > 1.0))
    for row, col in zip(*np.nonzero(non_finite | out_of_range)):
        value = probs[row, col]
        if non_finite[row, col]:
            violations.append(f"row {row}, column '{names[col]}': non-finite value {float(value)}")
        else:
            violations.append(f"row {row}, column '{names[col]}': probability {float(value)!r} outside [0, 1]")

    return StreamVerdict(
        video_id=stream.video_id, frame_count=stream.frame_count, violations=violations
    )


def label_space_from_document(document: Dict[str, Any]) -> LabelSpace:
    try:
        return LabelSpace(
            anatomy_names=tuple(document["anatomy"]),
            pathology_names=tuple(document["pathology"]),
        )
    except KeyError as e:
        raise ConfigError(f"label space document is missing '{e.args[0]}'") from e
    except ValidationError as e:
        raise ConfigError(f"invalid label space: {e}") from e


def load_label_space(path: Union[str, Path]) -> LabelSpace:
    """
    Load a label space from JSON: {"anatomy": [5 names], "pathology": [12 names]}.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"label space file not found: {path}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"{path}: not valid UTF-8 text") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}: invalid JSON ({e.msg})") from e
    if not isinstance(document, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return label_space_from_document(document)
