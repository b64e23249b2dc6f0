"""
Graph nodes package - Node implementations for the decode pipeline.

This package provides the node functions used by the LangGraph workflow:
- validation: validate input, temperature/sigmoid calibration
- anatomy: anatomy argmax + vote smoothing, pathology gating
- decoding: hysteresis and Viterbi decoders
- events: composition, scoring, escalation
"""

from gi_events.graph.nodes.anatomy import node_anatomy, node_gate
from gi_events.graph.nodes.decoding import node_hysteresis, node_viterbi
from gi_events.graph.nodes.events import node_compose, node_escalate, node_score
from gi_events.graph.nodes.validation import node_calibrate, node_validate

__all__ = [
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
