"""
Decoder nodes - binary pathology activity from the (gated) stream.

Contains:
- node_hysteresis: two-threshold state machine (default)
- node_viterbi: per-class two-state HMM
"""

from typing import Any, Dict

from gi_events.core.decoding import hysteresis_decode, viterbi_decode
from gi_events.core.errors import GIEventsError
from gi_events.core.state import PipelineState
from gi_events.graph.nodes.config import (
    STATUS_DECODED,
    StructuredLogger,
    decode_input,
    node_failure,
)


def _decoded(state: PipelineState, log: StructuredLogger, activity) -> Dict[str, Any]:
    log.info(f"{int(activity.active.sum())} active pathology frame-labels")
    return {
        "pathology_activity": activity,
        "status": STATUS_DECODED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def node_hysteresis(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Hysteresis")
    settings = state["settings"]
    cfg = settings.hysteresis
    try:
        activity = hysteresis_decode(decode_input(state), cfg, settings.space.pathology_indices)
    except GIEventsError as e:
        return node_failure(state, log, e)
    log.debug(f"t_on={cfg.t_on} t_off={cfg.t_off} min_len={cfg.min_len}")
    return _decoded(state, log, activity)


def node_viterbi(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Viterbi")
    settings = state["settings"]
    try:
        activity = viterbi_decode(
            decode_input(state), settings.hmm, settings.space.pathology_indices, settings.epsilon
        )
    except GIEventsError as e:
        return node_failure(state, log, e)
    log.debug(f"stay_prob={settings.hmm.stay_prob} T={settings.hmm.temperature}")
    return _decoded(state, log, activity)
