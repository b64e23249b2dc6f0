"""Shared fixtures and stream builders for the test suite."""

import numpy as np
import pytest

from gi_events.core.schemas import ActivityMatrix, LabelSpace, ProbabilityStream
from gi_events.utils.constants import NUM_CLASSES


def stream_from_columns(columns, video_id="vid"):
    """N x 17 stream with the given {class index: probability sequence} columns, 0 elsewhere."""
    n = len(next(iter(columns.values()))) if columns else 0
    probs = np.zeros((n, NUM_CLASSES))
    for c, values in columns.items():
        probs[:, c] = values
    return ProbabilityStream(video_id=video_id, probs=probs)


def activity_from_sets(active_sets, video_id="vid"):
    """ActivityMatrix from a list of per-frame active class sets."""
    active = np.zeros((len(active_sets), NUM_CLASSES), dtype=np.uint8)
    for t, classes in enumerate(active_sets):
        for c in classes:
            active[t, c] = 1
    return ActivityMatrix(video_id=video_id, active=active)


@pytest.fixture
def space():
    return LabelSpace()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
