"""
Event composition - turning per-frame activity into temporal events.

Contains:
- compose_gt_style: one event per (label, run of constant active set)
- compose_per_label: one event per maximal run of each label
- event_scores: mean label probability over each event
- rasterize / anatomy_activity: back to ActivityMatrix form
"""

from typing import List, Optional

import numpy as np

from gi_events.core.anatomy import one_hot_track
from gi_events.core.errors import DimensionMismatchError
from gi_events.core.schemas import (
    ActivityMatrix,
    AnatomyTrack,
    Event,
    EventSet,
    ProbabilityStream,
)
from gi_events.utils.constants import NUM_ANATOMY_CLASSES, NUM_CLASSES
from gi_events.utils.helpers import boolean_runs, value_runs


# ============================================================================
# COMPOSITION
# ============================================================================

def compose_gt_style(activity: ActivityMatrix) -> EventSet:
    """
    Fragment activity at every change of the full active set.

    Adjacent events of the same label are kept separate when another label
    switches on or off between them.
    """
    active = activity.active
    events: List[Event] = []
    for start, end in value_runs(active):
        for label in np.flatnonzero(active[start]):
            events.append(Event(label=int(label), start_frame=start, end_frame=end))
    return EventSet(video_id=activity.video_id, frame_count=activity.frame_count, events=tuple(events))


def compose_per_label(activity: ActivityMatrix) -> EventSet:
    """Run-length encode every class independently, ordered by start then label."""
    active = activity.active
    events: List[Event] = []
    for label in range(activity.num_columns):
        for start, end in boolean_runs(active[:, label]):
            events.append(Event(label=label, start_frame=start, end_frame=end))
    events.sort(key=lambda e: (e.start_frame, e.label))
    return EventSet(video_id=activity.video_id, frame_count=activity.frame_count, events=tuple(events))


def event_scores(events: EventSet, probs: Optional[ProbabilityStream]) -> EventSet:
    """
    Attach a confidence to every event.

    Args:
        events: Event set to score
        probs: Stream the events were decoded from; None leaves scores absent

    Returns:
        EventSet whose scores are the mean probability of the event's label
        over its frames
    """
    if probs is None:
        return events
    if probs.frame_count != events.frame_count:
        raise DimensionMismatchError(
            f"stream has {probs.frame_count} frames, event set has {events.frame_count}"
        )
    matrix = probs.probs
    scored = []
    for i, event in enumerate(events.events):
        if event.label >= probs.num_columns:
            raise DimensionMismatchError(f"event {i}: label {event.label} has no stream column")
        mean = float(matrix[event.start_frame : event.end_frame + 1, event.label].mean())
        scored.append(event.model_copy(update={"score": min(max(mean, 0.0), 1.0)}))
    return events.model_copy(update={"events": tuple(scored)})


# ============================================================================
# RASTERIZATION
# ============================================================================

def rasterize(event_set: EventSet, num_classes: int = NUM_CLASSES) -> ActivityMatrix:
    """Mark every frame covered by an event of a label as active for that label."""
    active = np.zeros((event_set.frame_count, num_classes), dtype=np.uint8)
    for event in event_set.events:
        if event.label >= num_classes:
            raise DimensionMismatchError(f"label {event.label} >= {num_classes} columns")
        active[event.start_frame : event.end_frame + 1, event.label] = 1
    return ActivityMatrix(video_id=event_set.video_id, active=active)


def anatomy_activity(track: AnatomyTrack, pathology_activity: ActivityMatrix) -> ActivityMatrix:
    """
    Combine the smoothed anatomy track (exactly one anatomy per frame) with
    decoded pathology columns.
    """
    if track.frame_count != pathology_activity.frame_count:
        raise DimensionMismatchError(
            f"anatomy track has {track.frame_count} frames, activity has {pathology_activity.frame_count}"
        )
    merged = np.array(pathology_activity.active, copy=True)
    merged[:, :NUM_ANATOMY_CLASSES] = one_hot_track(track)
    return ActivityMatrix(video_id=pathology_activity.video_id, active=merged)
