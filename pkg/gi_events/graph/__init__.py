"""LangGraph decode pipeline and node definitions."""

from gi_events.graph.pipeline_engine import (
    PipelineResult,
    decode_corpus,
    pipeline_app,
    run_pipeline,
)
from gi_events.graph.nodes import (
    node_anatomy,
    node_calibrate,
    node_compose,
    node_escalate,
    node_gate,
    node_hysteresis,
    node_score,
    node_validate,
    node_viterbi,
)

__all__ = [
    "pipeline_app",
    "run_pipeline",
    "decode_corpus",
    "PipelineResult",
    "node_validate",
    "node_calibrate",
    "node_anatomy",
    "node_gate",
    "node_hysteresis",
    "node_viterbi",
    "node_compose",
    "node_score",
    "node_escalate",
]
