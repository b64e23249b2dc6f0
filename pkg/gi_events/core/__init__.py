"""Core components: domain schemas, configuration, state and the algorithms."""

from gi_events.core.config import (
    EvalConfig,
    FocalConfig,
    HmmConfig,
    HysteresisConfig,
    PipelineSettings,
    RunConfig,
    VoteWindow,
    load_run_config,
)
from gi_events.core.errors import (
    ConfigError,
    DimensionMismatchError,
    EvaluationError,
    EventFileError,
    GIEventsError,
    StreamValidationError,
)
from gi_events.core.schemas import (
    ActivityMatrix,
    AnatomyTrack,
    ClassCounts,
    ClassWeights,
    EvalReport,
    Event,
    EventSet,
    GatingPrior,
    LabelMatrix,
    LabelSpace,
    ProbabilityStream,
    ScoreStream,
    SegmentCountReport,
)
from gi_events.core.state import PipelineState

__all__ = [
    # Configuration
    "EvalConfig",
    "FocalConfig",
    "HmmConfig",
    "HysteresisConfig",
    "PipelineSettings",
    "RunConfig",
    "VoteWindow",
    "load_run_config",
    # Errors
    "GIEventsError",
    "ConfigError",
    "DimensionMismatchError",
    "EvaluationError",
    "EventFileError",
    "StreamValidationError",
    # Schemas
    "ActivityMatrix",
    "AnatomyTrack",
    "ClassCounts",
    "ClassWeights",
    "EvalReport",
    "Event",
    "EventSet",
    "GatingPrior",
    "LabelMatrix",
    "LabelSpace",
    "ProbabilityStream",
    "ScoreStream",
    "SegmentCountReport",
    # State
    "PipelineState",
]
