"""
Pipeline Engine - Runs the per-video decode workflow as a LangGraph graph.

validate -> calibrate -> anatomy -> [gate] -> hysteresis | viterbi
         -> compose -> score, with every node able to divert to escalate.
"""

import asyncio
from typing import Any, Dict, List, Optional, Sequence, Union

from langgraph.graph import END, StateGraph
from pydantic import BaseModel, ConfigDict

from gi_events.core.config import PipelineSettings
from gi_events.core.errors import GIEventsError
from gi_events.core.schemas import (
    ActivityMatrix,
    AnatomyTrack,
    EventSet,
    ProbabilityStream,
    ScoreStream,
)
from gi_events.core.state import PipelineState
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
from gi_events.graph.nodes.config import STATUS_FAILED, STATUS_SCORED
from gi_events.utils.constants import DECODER_VITERBI
from gi_events.utils.helpers import StructuredLogger

StreamInput = Union[ProbabilityStream, ScoreStream]


# ============================================================================
# ROUTERS
# ============================================================================

def continue_or_escalate(next_node: str):
    """Router factory: go to next_node unless the last node FAILED."""

    def route(state: PipelineState) -> str:
        return "escalate" if state.get("status") == STATUS_FAILED else next_node

    route.__name__ = f"to_{next_node}"
    return route


def choose_decoder(state: PipelineState) -> str:
    if state.get("status") == STATUS_FAILED:
        return "escalate"
    return "viterbi" if state["settings"].decoder == DECODER_VITERBI else "hysteresis"


def gate_or_decode(state: PipelineState) -> str:
    """After the anatomy node: gate when enabled, otherwise straight to the decoder."""
    if state.get("status") == STATUS_FAILED:
        return "escalate"
    if state["settings"].gating_enabled:
        return "gate"
    return choose_decoder(state)


# ============================================================================
# GRAPH
# ============================================================================

pipeline_workflow = StateGraph(PipelineState)

pipeline_workflow.add_node("validate", node_validate)
pipeline_workflow.add_node("calibrate", node_calibrate)
pipeline_workflow.add_node("anatomy", node_anatomy)
pipeline_workflow.add_node("gate", node_gate)
pipeline_workflow.add_node("hysteresis", node_hysteresis)
pipeline_workflow.add_node("viterbi", node_viterbi)
pipeline_workflow.add_node("compose", node_compose)
pipeline_workflow.add_node("score", node_score)
pipeline_workflow.add_node("escalate", node_escalate)

pipeline_workflow.set_entry_point("validate")

for source, target in (("validate", "calibrate"), ("calibrate", "anatomy"), ("compose", "score")):
    pipeline_workflow.add_conditional_edges(
        source, continue_or_escalate(target), {target: target, "escalate": "escalate"}
    )

pipeline_workflow.add_conditional_edges(
    "anatomy",
    gate_or_decode,
    {"gate": "gate", "hysteresis": "hysteresis", "viterbi": "viterbi", "escalate": "escalate"},
)
pipeline_workflow.add_conditional_edges(
    "gate",
    choose_decoder,
    {"hysteresis": "hysteresis", "viterbi": "viterbi", "escalate": "escalate"},
)
for decoder in ("hysteresis", "viterbi"):
    pipeline_workflow.add_conditional_edges(
        decoder, continue_or_escalate("compose"), {"compose": "compose", "escalate": "escalate"}
    )

pipeline_workflow.add_edge("score", END)
pipeline_workflow.add_edge("escalate", END)

pipeline_app = pipeline_workflow.compile()


# ============================================================================
# RUNNERS
# ============================================================================

class PipelineResult(BaseModel):
    """Events of one video plus the intermediates worth inspecting."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    video_id: str
    events: EventSet
    calibrated: ProbabilityStream
    raw_track: AnatomyTrack
    track: AnatomyTrack
    gated: Optional[ProbabilityStream] = None
    activity: ActivityMatrix
    logs: List[str] = []


def initial_state(stream: StreamInput, settings: PipelineSettings) -> PipelineState:
    is_scores = isinstance(stream, ScoreStream)
    return PipelineState(
        video_id=stream.video_id,
        settings=settings,
        scores=stream if is_scores else None,
        stream=None if is_scores else stream,
        status="PENDING",
        error=None,
        logs=[],
    )


def run_pipeline(stream: StreamInput, settings: Optional[PipelineSettings] = None) -> PipelineResult:
    """
    Decode one video.

    Args:
        stream: Logits (ScoreStream) or probabilities (ProbabilityStream)
        settings: Resolved settings; defaults when omitted

    Returns:
        PipelineResult

    Raises:
        GIEventsError: when any node failed
    """
    settings = settings or PipelineSettings()
    final: Dict[str, Any] = pipeline_app.invoke(initial_state(stream, settings))
    if final.get("status") != STATUS_SCORED:
        raise GIEventsError(f"'{stream.video_id}': {final.get('error') or 'pipeline did not finish'}")
    return PipelineResult(
        video_id=stream.video_id,
        events=final["events"],
        calibrated=final["calibrated"],
        raw_track=final["raw_track"],
        track=final["track"],
        gated=final.get("gated"),
        activity=final["activity"],
        logs=final.get("logs") or [],
    )


async def decode_corpus(
    streams: Sequence[StreamInput], settings: Optional[PipelineSettings] = None
) -> List[PipelineResult]:
    """
    Decode several videos concurrently, one worker thread each.

    Results come back in input order whatever the completion order.
    """
    log = StructuredLogger("Corpus")
    settings = settings or PipelineSettings()
    log.info(f"decoding {len(streams)} video(s)")
    results = await asyncio.gather(*(asyncio.to_thread(run_pipeline, s, settings) for s in streams))
    return list(results)
