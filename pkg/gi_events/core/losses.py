"""
Loss kernels - sigmoid scoring, clipped class weights, weighted BCE and
focal-style loss with analytic gradients.

All kernels are pure numpy functions; gradients exist for verification only.
"""

from typing import NamedTuple, Tuple

import numpy as np

from gi_events.core.config import FocalConfig
from gi_events.core.errors import ConfigError, DimensionMismatchError, StreamValidationError
from gi_events.core.schemas import (
    ClassCounts,
    ClassWeights,
    LabelMatrix,
    ProbabilityStream,
    ScoreStream,
)
from gi_events.utils.constants import (
    DEFAULT_W_MAX,
    DEFAULT_W_MIN,
    GRADIENT_CHECK_STEP,
    NUM_CLASSES,
    PROB_EPSILON,
)


class BceLoss(NamedTuple):
    per_class: np.ndarray
    total: float


# ============================================================================
# SCORING
# ============================================================================

def sigmoid(z):
    """
    Numerically stable logistic function.

    Accepts a scalar or an array; never overflows for large |z|.
    Non-finite inputs are rejected.
    """
    arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise StreamValidationError("sigmoid: non-finite input")
    e = np.exp(-np.abs(arr))
    out = np.where(arr >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    if out.ndim == 0:
        return float(out)
    return out


# ============================================================================
# CLASS WEIGHTS
# ============================================================================

def class_weights(
    counts: ClassCounts,
    w_min: float = DEFAULT_W_MIN,
    w_max: float = DEFAULT_W_MAX,
) -> ClassWeights:
    """
    Negative/positive ratio per class, clipped into [w_min, w_max].

    A class without positives has an infinite raw ratio and gets w_max.
    """
    if w_min < 0 or w_min > w_max:
        raise ConfigError(f"need 0 <= w_min <= w_max, got [{w_min}, {w_max}]")
    pos = np.asarray(counts.pos, dtype=np.float64)
    neg = np.asarray(counts.neg, dtype=np.float64)
    raw = np.full(pos.shape, np.inf)
    np.divide(neg, pos, out=raw, where=pos > 0)
    clipped = np.clip(raw, w_min, w_max)
    return ClassWeights(weights=tuple(float(w) for w in clipped), w_min=w_min, w_max=w_max)


# ============================================================================
# WEIGHTED BCE / FOCAL
# ============================================================================

def _check_inputs(matrix: np.ndarray, labels: LabelMatrix, weights: ClassWeights) -> None:
    if matrix.shape != labels.labels.shape:
        raise DimensionMismatchError(
            f"prediction shape {matrix.shape} != label shape {labels.labels.shape}"
        )
    if matrix.shape[1] != NUM_CLASSES:
        raise DimensionMismatchError(f"expected {NUM_CLASSES} classes, got {matrix.shape[1]}")
    if matrix.shape[0] == 0:
        raise DimensionMismatchError("loss needs at least one frame (N = 0)")


def _log_terms(
    p: np.ndarray, y: np.ndarray, w: np.ndarray, epsilon: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = np.clip(p, epsilon, 1.0 - epsilon)
    pos_term = w * y * np.log(p)
    neg_term = (1.0 - y) * np.log1p(-p)
    return p, pos_term, neg_term


def weighted_bce(
    probs: ProbabilityStream,
    labels: LabelMatrix,
    weights: ClassWeights,
    epsilon: float = PROB_EPSILON,
) -> BceLoss:
    """
    Class-weighted binary cross-entropy.

    Returns:
        BceLoss with the per-class mean loss and its sum over classes
    """
    _check_inputs(probs.probs, labels, weights)
    n = probs.frame_count
    y = labels.labels.astype(np.float64)
    _, pos_term, neg_term = _log_terms(probs.probs, y, weights.as_array(), epsilon)
    per_class = -(pos_term + neg_term).sum(axis=0) / n
    return BceLoss(per_class=per_class, total=float(per_class.sum()))


def weighted_bce_grad(
    scores: ScoreStream,
    labels: LabelMatrix,
    weights: ClassWeights,
    epsilon: float = PROB_EPSILON,
) -> np.ndarray:
    """
    Analytic gradient of the total weighted BCE with respect to the logits.

    dL/dz_ic = ((1 - y) p - w_c y (1 - p)) / N, zero where the probability
    clamp is active.
    """
    _check_inputs(scores.scores, labels, weights)
    n = scores.frame_count
    p = sigmoid(scores.scores)
    y = labels.labels.astype(np.float64)
    w = weights.as_array()
    grad = ((1.0 - y) * p - w * y * (1.0 - p)) / n
    inside = (p > epsilon) & (p < 1.0 - epsilon)
    return np.where(inside, grad, 0.0)


def focal_loss(
    probs: ProbabilityStream,
    labels: LabelMatrix,
    weights: ClassWeights,
    cfg: FocalConfig,
    epsilon: float = PROB_EPSILON,
) -> float:
    """
    Focal-style weighted BCE summed over classes.

    With variant 'as_printed' the factor (1 - p)^gamma multiplies both the
    positive and the negative term; gamma = 0 reproduces weighted_bce exactly.
    """
    _check_inputs(probs.probs, labels, weights)
    n = probs.frame_count
    y = labels.labels.astype(np.float64)
    p, pos_term, neg_term = _log_terms(probs.probs, y, weights.as_array(), epsilon)
    pos_factor = (1.0 - p) ** cfg.gamma
    neg_factor = pos_factor if cfg.variant == "as_printed" else p ** cfg.gamma
    per_class = -(pos_factor * pos_term + neg_factor * neg_term).sum(axis=0) / n
    return float(per_class.sum())


# ============================================================================
# GRADIENT VERIFICATION
# ============================================================================

def numerical_grad(
    scores: ScoreStream,
    labels: LabelMatrix,
    weights: ClassWeights,
    step: float = GRADIENT_CHECK_STEP,
    epsilon: float = PROB_EPSILON,
) -> np.ndarray:
    """
    Central finite differences of weighted_bce w.r.t. every logit.

    Row i is perturbed on its own while every other frame is pinned to its
    label. Class c of row i only moves per_class[c], and the pinned frames add
    near-zero terms that are identical in both evaluations.
    """
    _check_inputs(scores.scores, labels, weights)
    z = scores.scores
    y = labels.labels.astype(np.float64)
    grad = np.zeros_like(z)
    for i in range(z.shape[0]):
        upper = y.copy()
        lower = y.copy()
        upper[i] = sigmoid(z[i] + step)
        lower[i] = sigmoid(z[i] - step)
        loss_up = weighted_bce(ProbabilityStream(video_id=scores.video_id, probs=upper), labels, weights, epsilon)
        loss_down = weighted_bce(ProbabilityStream(video_id=scores.video_id, probs=lower), labels, weights, epsilon)
        grad[i] = (loss_up.per_class - loss_down.per_class) / (2.0 * step)
    return grad


def gradient_check(
    scores: ScoreStream,
    labels: LabelMatrix,
    weights: ClassWeights,
    step: float = GRADIENT_CHECK_STEP,
    epsilon: float = PROB_EPSILON,
) -> float:
    """Maximum relative error between analytic and finite-difference gradients."""
    analytic = weighted_bce_grad(scores, labels, weights, epsilon)
    numeric = numerical_grad(scores, labels, weights, step, epsilon)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    return float(np.max(np.abs(analytic - numeric) / scale))
