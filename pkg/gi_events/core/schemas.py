"""
Schemas - Pydantic models for every domain object of the toolkit.

Streams carry numpy matrices; they are frozen after construction and their
arrays are marked read-only so instances can be shared across threads.
"""

from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from gi_events.utils.constants import (
    DEFAULT_ANATOMY_NAMES,
    DEFAULT_PATHOLOGY_NAMES,
    NUM_ANATOMY_CLASSES,
    NUM_CLASSES,
    NUM_PATHOLOGY_CLASSES,
)


def _frozen_matrix(value, dtype) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, NUM_CLASSES)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D frame x class matrix, got {arr.ndim}-D")
    arr.flags.writeable = False
    return arr


def _frozen_vector(value, dtype) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


def _binary_matrix(value) -> np.ndarray:
    arr = _frozen_matrix(value, np.float64)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    binary = arr.astype(np.uint8)
    binary.flags.writeable = False
    return binary


# ============================================================================
# LABEL SPACE
# ============================================================================

class LabelSpace(BaseModel):
    """The 17-class universe: 5 anatomy classes followed by 12 pathology classes."""

    model_config = ConfigDict(frozen=True)

    anatomy_names: Tuple[str, ...] = DEFAULT_ANATOMY_NAMES
    pathology_names: Tuple[str, ...] = DEFAULT_PATHOLOGY_NAMES

    @model_validator(mode="after")
    def _check_names(self) -> "LabelSpace":
        if len(self.anatomy_names) != NUM_ANATOMY_CLASSES:
            raise ValueError(
                f"expected {NUM_ANATOMY_CLASSES} anatomy names, got {len(self.anatomy_names)}"
            )
        if len(self.pathology_names) != NUM_PATHOLOGY_CLASSES:
            raise ValueError(
                f"expected {NUM_PATHOLOGY_CLASSES} pathology names, got {len(self.pathology_names)}"
            )
        names = self.class_names
        if any(not name.strip() for name in names):
            raise ValueError("class names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError("class names must be distinct")
        return self

    @property
    def class_names(self) -> Tuple[str, ...]:
        return tuple(self.anatomy_names) + tuple(self.pathology_names)

    @property
    def num_classes(self) -> int:
        return NUM_CLASSES

    @property
    def anatomy_indices(self) -> Tuple[int, ...]:
        return tuple(range(NUM_ANATOMY_CLASSES))

    @property
    def pathology_indices(self) -> Tuple[int, ...]:
        return tuple(range(NUM_ANATOMY_CLASSES, NUM_CLASSES))

    def index_of(self, name: str) -> int:
        """Class index for a name; raises KeyError for unknown names."""
        try:
            return self.class_names.index(name)
        except ValueError:
            raise KeyError(f"unknown class name '{name}'") from None

    def name_of(self, index: int) -> str:
        return self.class_names[index]


# ============================================================================
# FRAME STREAMS
# ============================================================================

class _FrameMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    video_id: str

    @property
    def frame_count(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def num_columns(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def matrix(self) -> np.ndarray:
        raise NotImplementedError


class ScoreStream(_FrameMatrix):
    """Per-frame real-valued logits z (N x 17)."""

    scores: np.ndarray

    @field_validator("scores", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_matrix(value, np.float64)

    @property
    def matrix(self) -> np.ndarray:
        return self.scores


class ProbabilityStream(_FrameMatrix):
    """
    Per-frame class probabilities p (N x 17).

    Construction only enforces the 2-D shape; range, width and finiteness
    are checked by validate_stream so that violations can be reported.
    """

    probs: np.ndarray

    @field_validator("probs", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_matrix(value, np.float64)

    @property
    def matrix(self) -> np.ndarray:
        return self.probs


class LabelMatrix(_FrameMatrix):
    """Binary ground-truth indicators y (N x 17)."""

    labels: np.ndarray

    @field_validator("labels", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _binary_matrix(value)

    @property
    def matrix(self) -> np.ndarray:
        return self.labels


class ActivityMatrix(_FrameMatrix):
    """Per-frame active indicator for every class (N x 17)."""

    active: np.ndarray

    @field_validator("active", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _binary_matrix(value)

    @property
    def matrix(self) -> np.ndarray:
        return self.active

    def active_set(self, frame: int) -> FrozenSet[int]:
        return frozenset(int(c) for c in np.flatnonzero(self.active[frame]))


class AnatomyTrack(BaseModel):
    """One anatomy index in [0, 4] per frame."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    video_id: str
    labels: np.ndarray

    @field_validator("labels", mode="before")
    @classmethod
    def _as_vector(cls, value):
        arr = _frozen_vector(value, np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= NUM_ANATOMY_CLASSES):
            raise ValueError(f"anatomy indices must lie in [0, {NUM_ANATOMY_CLASSES - 1}]")
        return arr

    @property
    def frame_count(self) -> int:
        return int(self.labels.shape[0])


# ============================================================================
# GATING PRIOR
# ============================================================================

class GatingPrior(BaseModel):
    """Allowed anatomy indices for each pathology index in [5, 16]."""

    model_config = ConfigDict(frozen=True)

    allowed: Dict[int, FrozenSet[int]]

    @model_validator(mode="after")
    def _check_coverage(self) -> "GatingPrior":
        expected = set(range(NUM_ANATOMY_CLASSES, NUM_CLASSES))
        keys = set(self.allowed)
        if keys != expected:
            missing = sorted(expected - keys)
            extra = sorted(keys - expected)
            raise ValueError(f"prior must cover pathologies 5..16 exactly (missing={missing}, extra={extra})")
        for pathology, anatomies in self.allowed.items():
            bad = [a for a in anatomies if not 0 <= a < NUM_ANATOMY_CLASSES]
            if bad:
                raise ValueError(f"pathology {pathology}: invalid anatomy indices {bad}")
        return self

    @classmethod
    def permissive(cls) -> "GatingPrior":
        """Every pathology allowed in every anatomy (gating is a no-op)."""
        everywhere = frozenset(range(NUM_ANATOMY_CLASSES))
        return cls(allowed={m: everywhere for m in range(NUM_ANATOMY_CLASSES, NUM_CLASSES)})

    def mask(self) -> np.ndarray:
        """Boolean (12 x 5) table: mask[m - 5, a] is True when m is allowed in a."""
        table = np.zeros((NUM_PATHOLOGY_CLASSES, NUM_ANATOMY_CLASSES), dtype=bool)
        for pathology, anatomies in self.allowed.items():
            for anatomy in anatomies:
                table[pathology - NUM_ANATOMY_CLASSES, anatomy] = True
        return table

    def is_permissive(self) -> bool:
        return bool(self.mask().all())


# ============================================================================
# CLASS COUNTS & WEIGHTS
# ============================================================================

class ClassCounts(BaseModel):
    """Positive / negative frame counts per class."""

    model_config = ConfigDict(frozen=True)

    pos: Tuple[int, ...]
    neg: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_counts(self) -> "ClassCounts":
        if len(self.pos) != NUM_CLASSES or len(self.neg) != NUM_CLASSES:
            raise ValueError(f"counts must have {NUM_CLASSES} entries")
        if min(self.pos + self.neg) < 0:
            raise ValueError("counts must be non-negative")
        totals = {p + n for p, n in zip(self.pos, self.neg)}
        if len(totals) > 1:
            raise ValueError("pos[c] + neg[c] must equal the same frame total for every class")
        return self

    @classmethod
    def from_labels(cls, labels: "LabelMatrix") -> "ClassCounts":
        if labels.num_columns != NUM_CLASSES:
            raise ValueError(f"label matrix has {labels.num_columns} columns, expected {NUM_CLASSES}")
        pos = labels.labels.sum(axis=0).astype(int)
        neg = labels.frame_count - pos
        return cls(pos=tuple(int(v) for v in pos), neg=tuple(int(v) for v in neg))

    @property
    def total(self) -> int:
        return self.pos[0] + self.neg[0]


class ClassWeights(BaseModel):
    """Clipped positive-class weights w_c with their bounds."""

    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, ...]
    w_min: float
    w_max: float

    @model_validator(mode="after")
    def _check_bounds(self) -> "ClassWeights":
        if self.w_min < 0 or self.w_max < self.w_min:
            raise ValueError(f"need 0 <= w_min <= w_max, got [{self.w_min}, {self.w_max}]")
        if len(self.weights) != NUM_CLASSES:
            raise ValueError(f"weights must have {NUM_CLASSES} entries, got {len(self.weights)}")
        for c, w in enumerate(self.weights):
            if not self.w_min <= w <= self.w_max:
                raise ValueError(f"weight {w} for class {c} outside [{self.w_min}, {self.w_max}]")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


# ============================================================================
# EVENTS
# ============================================================================

class Event(BaseModel):
    """A labeled temporal segment; frame bounds are 0-based and inclusive."""

    model_config = ConfigDict(frozen=True)

    label: int = Field(ge=0, lt=NUM_CLASSES)
    start_frame: int = Field(ge=0)
    end_frame: int = Field(ge=0)
    score: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_order(self) -> "Event":
        if self.start_frame > self.end_frame:
            raise ValueError(f"start_frame {self.start_frame} > end_frame {self.end_frame}")
        return self

    @property
    def length(self) -> int:
        return self.end_frame - self.start_frame + 1


class EventSet(BaseModel):
    """All events of one video, ordered; per label disjoint and sorted by start."""

    model_config = ConfigDict(frozen=True)

    video_id: str
    frame_count: int = Field(ge=0)
    events: Tuple[Event, ...] = ()

    @model_validator(mode="after")
    def _check_events(self) -> "EventSet":
        last_end: Dict[int, int] = {}
        for i, event in enumerate(self.events):
            if event.end_frame > self.frame_count - 1:
                raise ValueError(
                    f"event {i} ends at frame {event.end_frame}, beyond frame_count {self.frame_count}"
                )
            previous = last_end.get(event.label)
            if previous is not None and event.start_frame <= previous:
                raise ValueError(
                    f"event {i} overlaps or precedes an earlier event of label {event.label}"
                )
            last_end[event.label] = event.end_frame
        return self

    def label_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for event in self.events:
            counts[event.label] = counts.get(event.label, 0) + 1
        return counts

    def has_scores(self) -> bool:
        return all(e.score is not None for e in self.events)


# ============================================================================
# EVALUATION REPORTS
# ============================================================================

class SegmentCountRow(BaseModel):
    """Predicted vs ground-truth event count for one (video, label)."""

    video_id: str
    label: str
    predicted: int
    ground_truth: int
    flagged: bool = False


class SegmentTotals(BaseModel):
    predicted: int = 0
    ground_truth: int = 0


class SegmentCountReport(BaseModel):
    """Per-video and per-label segment counts used for temporal debugging."""

    factor: float
    rows: List[SegmentCountRow] = []
    video_totals: Dict[str, SegmentTotals] = {}
    totals: SegmentTotals = SegmentTotals()

    @property
    def flagged(self) -> List[SegmentCountRow]:
        return [row for row in self.rows if row.flagged]


class EvalReport(BaseModel):
    """Temporal AP / mAP at each IoU threshold plus segment-count diagnostics."""

    thresholds: List[float]
    per_class_ap: Dict[str, Dict[float, float]]
    per_video_map: Dict[str, Dict[float, float]]
    overall_map: Dict[float, float]
    diagnostics: SegmentCountReport

    @model_validator(mode="after")
    def _check_range(self) -> "EvalReport":
        tables = [self.overall_map, *self.per_class_ap.values(), *self.per_video_map.values()]
        for table in tables:
            for value in table.values():
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"AP value {value} outside [0, 1]")
        return self
