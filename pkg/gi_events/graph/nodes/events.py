"""
Event nodes - compose events, score them, escalate failures.

Contains:
- node_compose: anatomy + pathology activity into events (gt_style or per_label)
- node_score: mean-probability confidence per event
- node_escalate: terminal node for failed runs
"""

from typing import Any, Dict

from gi_events.core.composition import (
    anatomy_activity,
    compose_gt_style,
    compose_per_label,
    event_scores,
)
from gi_events.core.errors import GIEventsError
from gi_events.core.state import PipelineState
from gi_events.graph.nodes.config import (
    STATUS_COMPOSED,
    STATUS_ESCALATED,
    STATUS_SCORED,
    StructuredLogger,
    decode_input,
    node_failure,
)
from gi_events.utils.constants import COMPOSITION_GT_STYLE


def node_compose(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Compose")
    settings = state["settings"]

    try:
        activity = anatomy_activity(state["track"], state["pathology_activity"])
        if settings.composition == COMPOSITION_GT_STYLE:
            events = compose_gt_style(activity)
        else:
            events = compose_per_label(activity)
    except GIEventsError as e:
        return node_failure(state, log, e)

    log.info(f"{len(events.events)} events ({settings.composition})")
    return {
        "activity": activity,
        "events": events,
        "status": STATUS_COMPOSED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def node_score(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Score")
    try:
        scored = event_scores(state["events"], decode_input(state))
    except GIEventsError as e:
        return node_failure(state, log, e)

    log.success(f"'{scored.video_id}' decoded: {len(scored.events)} scored events")
    return {
        "events": scored,
        "status": STATUS_SCORED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def node_escalate(state: PipelineState) -> Dict[str, Any]:
    """Record the failure; the run ends here."""
    log = StructuredLogger("Escalate")
    log.warning(f"pipeline stopped: {state.get('error') or 'unknown error'}")
    return {
        "status": STATUS_ESCALATED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }
