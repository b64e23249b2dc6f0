"""
Pipeline State - TypedDict carried through the decode graph.

See doc/workflow.md for the node order.
"""

from typing import List, Optional, TypedDict

from gi_events.core.config import PipelineSettings
from gi_events.core.schemas import (
    ActivityMatrix,
    AnatomyTrack,
    EventSet,
    ProbabilityStream,
    ScoreStream,
)


class PipelineState(TypedDict, total=False):
    """
    State of one video's decode run.

    Inputs:
    - settings: resolved PipelineSettings
    - scores / stream: logits or probabilities (exactly one is set)

    Every node adds its product and appends to logs.
    """
    # Inputs
    video_id: str
    settings: PipelineSettings
    scores: Optional[ScoreStream]
    stream: Optional[ProbabilityStream]

    # Intermediates
    calibrated: ProbabilityStream
    raw_track: AnatomyTrack
    track: AnatomyTrack
    gated: ProbabilityStream
    pathology_activity: ActivityMatrix
    activity: ActivityMatrix

    # Output
    events: EventSet

    # Control flow
    status: str  # VALIDATED, CALIBRATED, ANATOMY_SMOOTHED, GATED, DECODED, COMPOSED, SCORED, FAILED
    error: Optional[str]

    # Logging
    logs: List[str]
