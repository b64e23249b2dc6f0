"""
Anatomy smoothing - one anatomy label per frame, stabilized by windowed voting.

Contains:
- anatomy_argmax: per-frame argmax over the anatomy columns
- vote_smooth: majority vote in a symmetric window truncated at the edges
- one_hot_track: the smoothed track as an N x 5 indicator block
"""

import numpy as np

from gi_events.core.config import VoteWindow
from gi_events.core.errors import DimensionMismatchError
from gi_events.core.schemas import AnatomyTrack, ProbabilityStream
from gi_events.utils.constants import NUM_ANATOMY_CLASSES


def anatomy_argmax(stream: ProbabilityStream) -> AnatomyTrack:
    """
    Pick the most probable anatomy class for every frame.

    np.argmax returns the first maximum, so ties go to the lowest index.
    """
    if stream.num_columns < NUM_ANATOMY_CLASSES:
        raise DimensionMismatchError(
            f"stream has {stream.num_columns} columns, need at least {NUM_ANATOMY_CLASSES}"
        )
    block = stream.probs[:, :NUM_ANATOMY_CLASSES]
    labels = np.argmax(block, axis=1) if stream.frame_count else np.zeros(0, dtype=np.int64)
    return AnatomyTrack(video_id=stream.video_id, labels=labels)


def _window_counts(labels: np.ndarray, radius: int) -> np.ndarray:
    # counts[t, k] = number of frames in [t - r, t + r] (clipped) labeled k
    n = labels.shape[0]
    one_hot = np.zeros((n, NUM_ANATOMY_CLASSES), dtype=np.int64)
    one_hot[np.arange(n), labels] = 1
    cumulative = np.vstack([np.zeros((1, NUM_ANATOMY_CLASSES), dtype=np.int64), np.cumsum(one_hot, axis=0)])
    frames = np.arange(n)
    lo = np.clip(frames - radius, 0, n)
    hi = np.clip(frames + radius + 1, 0, n)
    return cumulative[hi] - cumulative[lo]


def vote_smooth(track: AnatomyTrack, window: VoteWindow) -> AnatomyTrack:
    """
    Replace each label with the majority label of its window.

    Args:
        track: Per-frame anatomy labels
        window: Vote window; radius 0 returns the track unchanged

    Returns:
        Smoothed AnatomyTrack. On a tie the center label wins if it is among
        the maxima, otherwise the lowest tied index.
    """
    labels = track.labels
    if window.radius == 0 or labels.size == 0:
        return AnatomyTrack(video_id=track.video_id, labels=labels)

    counts = _window_counts(labels, window.radius)
    best = counts.max(axis=1)
    center_count = counts[np.arange(labels.size), labels]
    smoothed = np.where(center_count == best, labels, np.argmax(counts, axis=1))
    return AnatomyTrack(video_id=track.video_id, labels=smoothed)


def one_hot_track(track: AnatomyTrack) -> np.ndarray:
    block = np.zeros((track.frame_count, NUM_ANATOMY_CLASSES), dtype=np.uint8)
    block[np.arange(track.frame_count), track.labels] = 1
    return block
