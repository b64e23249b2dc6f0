"""
Temporal decoding - per-class binary activity from framewise probabilities.

Contains:
- hysteresis_decode: two-threshold state machine with minimum run length
- temperature_scale / recalibrate: sigmoid(z / T) on logits or probabilities
- viterbi_decode: MAP path of a symmetric two-state chain per class
"""

from typing import Iterable, List

import numpy as np

from gi_events.core.config import HmmConfig, HysteresisConfig
from gi_events.core.errors import ConfigError
from gi_events.core.losses import sigmoid
from gi_events.core.schemas import ActivityMatrix, ProbabilityStream, ScoreStream
from gi_events.utils.constants import PROB_EPSILON
from gi_events.utils.helpers import boolean_runs


def _selected(classes: Iterable[int], width: int) -> List[int]:
    selected = sorted(set(int(c) for c in classes))
    bad = [c for c in selected if not 0 <= c < width]
    if bad:
        raise ConfigError(f"class indices {bad} outside [0, {width - 1}]")
    return selected


# ============================================================================
# HYSTERESIS
# ============================================================================

def hysteresis_track(probs: np.ndarray, t_on: float, t_off: float) -> np.ndarray:
    """
    Run the OFF/ON state machine over one probability sequence.

    The machine starts OFF, switches ON at p >= t_on and back OFF at p < t_off;
    in between it holds its previous state.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        return np.zeros(0, dtype=bool)
    turn_on = p >= t_on
    turn_off = p < t_off
    decided = turn_on | turn_off
    # Forward-fill the last decided frame
    last = np.maximum.accumulate(np.where(decided, np.arange(p.size), -1))
    return np.where(last >= 0, turn_on[np.maximum(last, 0)], False)


def drop_short_runs(active: np.ndarray, min_len: int) -> np.ndarray:
    kept = np.array(active, dtype=bool, copy=True)
    if min_len <= 1:
        return kept
    for start, end in boolean_runs(kept):
        if end - start + 1 < min_len:
            kept[start : end + 1] = False
    return kept


def hysteresis_decode(
    stream: ProbabilityStream, cfg: HysteresisConfig, classes: Iterable[int]
) -> ActivityMatrix:
    """
    Decode the selected classes with the hysteresis state machine.

    Args:
        stream: Probability stream
        cfg: Thresholds and minimum run length
        classes: Class indices to decode; every other column stays 0

    Returns:
        ActivityMatrix of the stream's shape
    """
    if cfg.t_off > cfg.t_on:
        raise ConfigError(f"t_off ({cfg.t_off}) must not exceed t_on ({cfg.t_on})")
    active = np.zeros(stream.probs.shape, dtype=np.uint8)
    for c in _selected(classes, stream.num_columns):
        on = hysteresis_track(stream.probs[:, c], cfg.t_on, cfg.t_off)
        active[:, c] = drop_short_runs(on, cfg.min_len)
    return ActivityMatrix(video_id=stream.video_id, active=active)


# ============================================================================
# TEMPERATURE SCALING
# ============================================================================

def temperature_scale(scores: ScoreStream, temperature: float) -> ProbabilityStream:
    """p = sigmoid(z / T) entrywise."""
    if not temperature > 0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    probs = sigmoid(scores.scores / temperature) if scores.frame_count else scores.scores
    return ProbabilityStream(video_id=scores.video_id, probs=probs)


def recalibrate(
    stream: ProbabilityStream, temperature: float, epsilon: float = PROB_EPSILON
) -> ProbabilityStream:
    """
    Temperature-scale a probability stream through its clamped logit.

    Used when only probabilities, not logits, are available.
    """
    if not temperature > 0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    if stream.frame_count == 0:
        return stream
    p = np.clip(stream.probs, epsilon, 1.0 - epsilon)
    logits = np.log(p) - np.log1p(-p)
    return ProbabilityStream(video_id=stream.video_id, probs=sigmoid(logits / temperature))


# ============================================================================
# VITERBI
# ============================================================================

def viterbi_path(probs: np.ndarray, stay_prob: float, epsilon: float = PROB_EPSILON) -> np.ndarray:
    """
    Most likely OFF/ON path for one class, computed in log space.

    Emissions are p for ON and 1 - p for OFF (clamped), the chain is
    symmetric with stay_prob on the diagonal and starts uniform.
    Ties go to OFF, both in the recursion and at the final frame.
    """
    p = np.clip(np.asarray(probs, dtype=np.float64), epsilon, 1.0 - epsilon)
    n = p.size
    if n == 0:
        return np.zeros(0, dtype=bool)

    log_stay = np.log(stay_prob)
    log_switch = np.log1p(-stay_prob)
    emit = np.stack([np.log1p(-p), np.log(p)], axis=1)  # columns: OFF, ON

    score = np.log(0.5) + emit[0]
    back = np.zeros((n, 2), dtype=np.int8)
    for t in range(1, n):
        into_off = (score[0] + log_stay, score[1] + log_switch)
        into_on = (score[0] + log_switch, score[1] + log_stay)
        back[t, 0] = 1 if into_off[1] > into_off[0] else 0
        back[t, 1] = 1 if into_on[1] > into_on[0] else 0
        score = np.array([max(into_off), max(into_on)]) + emit[t]

    path = np.zeros(n, dtype=bool)
    state = 1 if score[1] > score[0] else 0
    for t in range(n - 1, -1, -1):
        path[t] = bool(state)
        state = back[t, state]
    return path


def viterbi_decode(
    stream: ProbabilityStream,
    cfg: HmmConfig,
    classes: Iterable[int],
    epsilon: float = PROB_EPSILON,
) -> ActivityMatrix:
    """
    Decode the selected classes with an independent two-state HMM each.

    Args:
        stream: Probability stream (temperature already applied)
        cfg: Stay probabilities, optionally per class
        classes: Class indices to decode; every other column stays 0

    Returns:
        ActivityMatrix of the stream's shape
    """
    active = np.zeros(stream.probs.shape, dtype=np.uint8)
    for c in _selected(classes, stream.num_columns):
        active[:, c] = viterbi_path(stream.probs[:, c], cfg.stay_for(c), epsilon)
    return ActivityMatrix(video_id=stream.video_id, active=active)
