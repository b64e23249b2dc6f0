"""
Input nodes - Validate the incoming stream and calibrate it.

Contains:
- node_validate: check logits or probabilities against the label space
- node_calibrate: temperature/sigmoid to the probability stream the rest reads
"""

from typing import Any, Dict

import numpy as np

from gi_events.core.decoding import recalibrate, temperature_scale
from gi_events.core.errors import GIEventsError, StreamValidationError
from gi_events.core.label_space import validate_stream
from gi_events.core.state import PipelineState
from gi_events.graph.nodes.config import (
    STATUS_CALIBRATED,
    STATUS_VALIDATED,
    StructuredLogger,
    node_failure,
)


def node_validate(state: PipelineState) -> Dict[str, Any]:
    """
    Validate whichever input was supplied.

    Logits only need the right width and finite values; probabilities go
    through validate_stream.
    """
    log = StructuredLogger("Validate")
    settings = state["settings"]
    scores = state.get("scores")
    stream = state.get("stream")

    try:
        if (scores is None) == (stream is None):
            raise StreamValidationError("exactly one of scores or stream must be given")
        if scores is not None:
            if scores.num_columns != settings.space.num_classes:
                raise StreamValidationError(
                    f"row width {scores.num_columns} != {settings.space.num_classes}",
                    [f"row width {scores.num_columns} != {settings.space.num_classes}"],
                )
            if not np.all(np.isfinite(scores.scores)):
                raise StreamValidationError(f"stream '{scores.video_id}' has non-finite logits")
            frames = scores.frame_count
        else:
            validate_stream(stream, settings.space).raise_for_errors()
            frames = stream.frame_count
    except GIEventsError as e:
        return node_failure(state, log, e)

    log.info(f"{frames} frames accepted ({'logits' if scores is not None else 'probabilities'})")
    return {
        "status": STATUS_VALIDATED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }


def node_calibrate(state: PipelineState) -> Dict[str, Any]:
    log = StructuredLogger("Calibrate")
    settings = state["settings"]
    temperature = settings.decode_temperature

    try:
        scores = state.get("scores")
        if scores is not None:
            calibrated = temperature_scale(scores, temperature)
            log.info(f"sigmoid(z / {temperature:g}) applied to logits")
        elif temperature != 1.0:
            calibrated = recalibrate(state["stream"], temperature, settings.epsilon)
            log.info(f"probabilities recalibrated at T = {temperature:g}")
        else:
            calibrated = state["stream"]
            log.debug("probabilities used as given")
    except GIEventsError as e:
        return node_failure(state, log, e)

    return {
        "calibrated": calibrated,
        "status": STATUS_CALIBRATED,
        "logs": (state.get("logs") or []) + log.get_logs(),
    }
