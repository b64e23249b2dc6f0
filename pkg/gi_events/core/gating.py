"""Anatomy gating of pathology probabilities."""

import numpy as np

from gi_events.core.errors import DimensionMismatchError
from gi_events.core.schemas import AnatomyTrack, GatingPrior, ProbabilityStream
from gi_events.utils.constants import NUM_ANATOMY_CLASSES, NUM_CLASSES


def gate_mask(track: AnatomyTrack, prior: GatingPrior) -> np.ndarray:
    """Boolean (N x 12) table: True where pathology m may fire at frame t."""
    return prior.mask()[:, track.labels].T


def apply_gate(stream: ProbabilityStream, track: AnatomyTrack, prior: GatingPrior) -> ProbabilityStream:
    """
    Zero every pathology probability whose frame anatomy is not allowed.

    Args:
        stream: Probability stream (N x 17)
        track: Smoothed anatomy track with the same frame count
        prior: Allowed anatomies per pathology

    Returns:
        New stream; anatomy columns are passed through untouched
    """
    if track.frame_count != stream.frame_count:
        raise DimensionMismatchError(
            f"anatomy track has {track.frame_count} frames, stream has {stream.frame_count}"
        )
    if stream.num_columns != NUM_CLASSES:
        raise DimensionMismatchError(f"expected {NUM_CLASSES} columns, got {stream.num_columns}")

    gated = np.array(stream.probs, copy=True)
    allowed = gate_mask(track, prior)
    gated[:, NUM_ANATOMY_CLASSES:] = np.where(allowed, gated[:, NUM_ANATOMY_CLASSES:], 0.0)
    return ProbabilityStream(video_id=stream.video_id, probs=gated)
