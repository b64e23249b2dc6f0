"""
Anatomy nodes - smoothed anatomy track and pathology gating.

Contains:
- node_anatomy: argmax over anatomy columns, then majority vote
- node_gate: zero pathologies outside their allowed anatomies
"""

from typing import Any, Dict

import numpy as np

from gi_events.core.anatomy import anatomy_argmax, vote_smooth
from gi_events.core.errors import GIEventsError
from gi_events.core.gating import apply_gate
from gi_events.core.state import PipelineState
from gi_events.graph.nodes.config import (
    STATUS_ANATOMY_SMOOTHED,
    STATUS_GATED,
    StructuredLogger,
    node_failure,
)


def node_anatomy(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Anatomy")
    settings = state["settings"]

    try:
        raw_track = anatomy_argmax(state["calibrated"])
        track = vote_smooth(raw_track, settings.vote_window)
    except GIEventsError as e:
        return node_failure(state, log, e)

    changed = int(np.count_nonzero(raw_track.labels != track.labels))
    log.info(f"vote radius {settings.vote_window.radius}: {changed} frame(s) relabeled")
    return {
        "raw_track": raw_track,
        "track": track,
        "status": STATUS_ANATOMY_SMOOTHED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def node_gate(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Gate")
    settings = state["settings"]
    calibrated = state["calibrated"]

    try:
        gated = apply_gate(calibrated, state["track"], settings.prior)
    except GIEventsError as e:
        return node_failure(state, log, e)

    suppressed = int(np.count_nonzero(calibrated.probs != gated.probs))
    if settings.prior.is_permissive():
        log.debug("permissive prior; gate is a no-op")
    log.info(f"{suppressed} pathology probabilities suppressed")
    return {
        "gated": gated,
        "status": STATUS_GATED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }
