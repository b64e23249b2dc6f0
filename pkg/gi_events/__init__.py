"""
GI Events - Temporal event decoding for capsule endoscopy frame classifiers.

Core workflow: per-frame probabilities → smoothed anatomy → gated pathologies
→ binary activity → GT-style events → temporal mAP.
See doc/workflow.md for details.
"""

from gi_events.core.config import PipelineSettings, RunConfig, load_run_config
from gi_events.core.schemas import EventSet, LabelSpace, ProbabilityStream
from gi_events.graph.pipeline_engine import decode_corpus, pipeline_app, run_pipeline


__version__ = "1.0.0"
__all__ = [
    "PipelineSettings",
    "RunConfig",
    "load_run_config",
    "EventSet",
    "LabelSpace",
    "ProbabilityStream",
    "pipeline_app",
    "run_pipeline",
    "decode_corpus",
]
