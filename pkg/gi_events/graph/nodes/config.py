"""
Shared helpers for all graph nodes.

Contains:
- Status names written to PipelineState.status
- node_failure: the common FAILED update for caught toolkit errors
- decode_input: the stream a decoder or scorer should read
"""

from typing import Any, Dict

from gi_events.core.errors import GIEventsError
from gi_events.core.schemas import ProbabilityStream
from gi_events.core.state import PipelineState
from gi_events.utils.helpers import StructuredLogger

# ============================================================================
# STATUSES
# ============================================================================

STATUS_VALIDATED = "VALIDATED"
STATUS_CALIBRATED = "CALIBRATED"
STATUS_ANATOMY_SMOOTHED = "ANATOMY_SMOOTHED"
STATUS_GATED = "GATED"
STATUS_DECODED = "DECODED"
STATUS_COMPOSED = "COMPOSED"
STATUS_SCORED = "SCORED"
STATUS_FAILED = "FAILED"
STATUS_ESCALATED = "ESCALATED"


def node_failure(state: PipelineState, log: StructuredLogger, error: GIEventsError) -> Dict[str, Any]:
    log.error(f"{type(error).__name__}: {error}")
    return {
        "status": STATUS_FAILED,
        "error": str(error),
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def decode_input(state: PipelineState) -> ProbabilityStream:
    """Gated probabilities when gating ran, calibrated ones otherwise."""
    gated = state.get("gated")
    return gated if gated is not None else state["calibrated"]
