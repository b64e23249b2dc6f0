import math

import numpy as np
import pytest

from gi_events.core.config import FocalConfig
from gi_events.core.errors import ConfigError, DimensionMismatchError, StreamValidationError
from gi_events.core.losses import (
    class_weights,
    focal_loss,
    gradient_check,
    numerical_grad,
    sigmoid,
    weighted_bce,
    weighted_bce_grad,
)
from gi_events.core.schemas import (
    ClassCounts,
    ClassWeights,
    LabelMatrix,
    ProbabilityStream,
    ScoreStream,
)


def _random_instance(rng, n):
    z = rng.uniform(-4.0, 4.0, size=(n, 17))
    y = rng.integers(0, 2, size=(n, 17))
    w = rng.uniform(1.0, 50.0, size=17)
    return (
        ScoreStream(video_id="v", scores=z),
        LabelMatrix(video_id="v", labels=y),
        ClassWeights(weights=tuple(w), w_min=1.0, w_max=50.0),
    )


# ============================================================================
# SIGMOID
# ============================================================================

def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(1000.0) == 1.0
    assert sigmoid(-1000.0) == 0.0
    assert math.isclose(sigmoid(math.log(3.0)), 0.75, rel_tol=1e-15)
    out = sigmoid(np.array([-2.0, 0.0, 2.0]))
    assert out.shape == (3,)
    assert math.isclose(out[0] + out[2], 1.0, rel_tol=1e-15)


def test_sigmoid_rejects_non_finite():
    with pytest.raises(StreamValidationError):
        sigmoid(np.array([0.0, np.nan]))


# ============================================================================
# CLASS WEIGHTS
# ============================================================================

def _counts_grid(limit=200):
    """All (pos, neg) pairs in [0, limit]^2, packed 17 at a time with a shared total."""
    batches = []
    for total in range(0, 2 * limit + 1):
        pairs = [(p, total - p) for p in range(max(0, total - limit), min(limit, total) + 1)]
        for i in range(0, len(pairs), 17):
            chunk = pairs[i : i + 17]
            chunk += [chunk[-1]] * (17 - len(chunk))
            batches.append(chunk)
    return batches


def test_class_weights_clipping_exhaustive():
    checked = 0
    for chunk in _counts_grid():
        counts = ClassCounts(pos=tuple(p for p, _ in chunk), neg=tuple(n for _, n in chunk))
        weights = class_weights(counts, 1.0, 50.0).weights
        for (pos, neg), w in zip(chunk, weights):
            assert 1.0 <= w <= 50.0
            if pos == 0:
                assert w == 50.0
            else:
                ratio = neg / pos
                if 1.0 <= ratio <= 50.0:
                    assert w == ratio
            checked += 1
    assert checked >= 201 * 201


def test_class_weights_examples():
    balanced = ClassCounts(pos=(10,) * 17, neg=(10,) * 17)
    assert class_weights(balanced).weights == (1.0,) * 17

    rare = ClassCounts(pos=(1,) + (50,) * 16, neg=(999,) + (950,) * 16)
    weights = class_weights(rare).weights
    assert weights[0] == 50.0
    assert weights[1] == 19.0


def test_class_weights_invalid_bounds():
    counts = ClassCounts(pos=(1,) * 17, neg=(1,) * 17)
    with pytest.raises(ConfigError):
        class_weights(counts, 5.0, 1.0)


def test_class_counts_from_labels():
    labels = LabelMatrix(video_id="v", labels=np.eye(17, dtype=np.uint8)[[0, 0, 3]])
    counts = ClassCounts.from_labels(labels)
    assert counts.pos[0] == 2 and counts.neg[0] == 1
    assert counts.pos[3] == 1
    assert counts.total == 3


# ============================================================================
# WEIGHTED BCE / FOCAL
# ============================================================================

def test_weighted_bce_matches_direct_formula(rng):
    scores, labels, weights = _random_instance(rng, 5)
    probs = ProbabilityStream(video_id="v", probs=sigmoid(scores.scores))
    loss = weighted_bce(probs, labels, weights)

    p, y, w = probs.probs, labels.labels, weights.as_array()
    expected = -(w * y * np.log(p) + (1 - y) * np.log(1 - p)).mean(axis=0)
    assert np.allclose(loss.per_class, expected, rtol=1e-12, atol=0)
    assert math.isclose(loss.total, float(expected.sum()), rel_tol=1e-12)


@pytest.mark.parametrize(
    "probs, targets, weight, expected",
    [
        ((0.5,), (1,), 1.0, math.log(2)),
        ((0.5,), (0,), 7.0, math.log(2)),
        ((0.9, 0.2), (1, 0), 3.0, 0.269623),
    ],
)
def test_weighted_bce_worked_examples(probs, targets, weight, expected):
    n = len(probs)
    p = np.full((n, 17), 0.5)
    y = np.zeros((n, 17))
    p[:, 0] = probs
    y[:, 0] = targets
    weights = ClassWeights(weights=(weight,) + (1.0,) * 16, w_min=1.0, w_max=50.0)
    loss = weighted_bce(ProbabilityStream(video_id="v", probs=p), LabelMatrix(video_id="v", labels=y), weights)
    print(f"p={probs} y={targets} w={weight}: {loss.per_class[0]:.6f}")
    assert loss.per_class[0] == pytest.approx(expected, abs=1e-6)


def test_weighted_bce_clamps_extremes():
    probs = ProbabilityStream(video_id="v", probs=np.ones((1, 17)))
    labels = LabelMatrix(video_id="v", labels=np.zeros((1, 17)))
    weights = ClassWeights(weights=(1.0,) * 17, w_min=1.0, w_max=50.0)
    loss = weighted_bce(probs, labels, weights)
    assert np.all(np.isfinite(loss.per_class))


def test_loss_shape_errors():
    probs = ProbabilityStream(video_id="v", probs=np.full((2, 17), 0.5))
    weights = ClassWeights(weights=(1.0,) * 17, w_min=1.0, w_max=50.0)
    with pytest.raises(DimensionMismatchError):
        weighted_bce(probs, LabelMatrix(video_id="v", labels=np.zeros((3, 17))), weights)
    with pytest.raises(DimensionMismatchError, match="N = 0"):
        weighted_bce(
            ProbabilityStream(video_id="v", probs=np.zeros((0, 17))),
            LabelMatrix(video_id="v", labels=np.zeros((0, 17))),
            weights,
        )


def test_focal_gamma_zero_equals_bce(rng):
    for _ in range(100):
        scores, labels, weights = _random_instance(rng, int(rng.integers(1, 9)))
        probs = ProbabilityStream(video_id="v", probs=sigmoid(scores.scores))
        bce = weighted_bce(probs, labels, weights).total
        for variant in ("as_printed", "standard"):
            focal = focal_loss(probs, labels, weights, FocalConfig(gamma=0.0, variant=variant))
            assert abs(focal - bce) <= 1e-12


@pytest.mark.parametrize("target", [1, 0])
def test_focal_worked_example(target):
    p = np.full((1, 17), 0.5)
    y = np.zeros((1, 17))
    y[0, 0] = target
    labels = LabelMatrix(video_id="v", labels=y)
    weights = ClassWeights(weights=(1.0,) * 17, w_min=1.0, w_max=50.0)
    total = focal_loss(ProbabilityStream(video_id="v", probs=p), labels, weights, FocalConfig(gamma=2.0))
    # every column contributes 0.25 ln 2 at p = 0.5, whatever its label
    assert total / 17 == pytest.approx(0.25 * math.log(2), abs=1e-6)
    assert 0.25 * math.log(2) == pytest.approx(0.173287, abs=1e-6)


def test_focal_never_exceeds_bce(rng):
    scores, labels, weights = _random_instance(rng, 8)
    probs = ProbabilityStream(video_id="v", probs=sigmoid(scores.scores))
    bce = weighted_bce(probs, labels, weights).total
    for variant in ("as_printed", "standard"):
        assert focal_loss(probs, labels, weights, FocalConfig(gamma=2.0, variant=variant)) <= bce


def test_focal_variants_differ_on_negatives():
    probs = ProbabilityStream(video_id="v", probs=np.full((1, 17), 0.9))
    labels = LabelMatrix(video_id="v", labels=np.zeros((1, 17)))
    weights = ClassWeights(weights=(1.0,) * 17, w_min=1.0, w_max=50.0)
    as_printed = focal_loss(probs, labels, weights, FocalConfig(gamma=2.0))
    standard = focal_loss(probs, labels, weights, FocalConfig(gamma=2.0, variant="standard"))
    # Confident false positive: (1 - p)^2 = 0.01 vs p^2 = 0.81
    assert math.isclose(standard / as_printed, 81.0, rel_tol=1e-9)


# ============================================================================
# GRADIENTS
# ============================================================================

def test_gradient_check_random_instances(rng):
    worst = 0.0
    for _ in range(100):
        scores, labels, weights = _random_instance(rng, int(rng.integers(1, 9)))
        worst = max(worst, gradient_check(scores, labels, weights, step=1e-5))
    assert worst <= 1e-6


def test_gradient_formula_single_entry():
    z = np.zeros((2, 17))
    y = np.zeros((2, 17))
    y[0, 0] = 1
    weights = ClassWeights(weights=(4.0,) + (1.0,) * 16, w_min=1.0, w_max=50.0)
    grad = weighted_bce_grad(
        ScoreStream(video_id="v", scores=z), LabelMatrix(video_id="v", labels=y), weights
    )
    # p = 0.5: positive entry -w(1-p)/N, negative entry p/N
    assert grad[0, 0] == pytest.approx(-4.0 * 0.5 / 2)
    assert grad[1, 0] == pytest.approx(0.5 / 2)
    numeric = numerical_grad(
        ScoreStream(video_id="v", scores=z), LabelMatrix(video_id="v", labels=y), weights
    )
    assert np.allclose(grad, numeric, rtol=1e-7, atol=1e-12)


def test_gradient_check_differences_the_shipped_loss(rng, monkeypatch):
    from gi_events.core import losses

    scores, labels, weights = _random_instance(rng, 4)
    assert gradient_check(scores, labels, weights) <= 1e-6

    real_bce = losses.weighted_bce
    corruptions = {
        "constant": lambda *args, **kwargs: losses.BceLoss(per_class=np.zeros(17), total=123.0),
        "summed over frames": lambda probs, *args, **kwargs: losses.BceLoss(
            per_class=real_bce(probs, *args, **kwargs).per_class * probs.frame_count, total=0.0
        ),
        "unweighted": lambda probs, labels_, weights_, *args, **kwargs: real_bce(
            probs, labels_, ClassWeights(weights=(1.0,) * 17, w_min=0.0, w_max=50.0), *args, **kwargs
        ),
    }
    for name, corrupted in corruptions.items():
        monkeypatch.setattr(losses, "weighted_bce", corrupted)
        error = gradient_check(scores, labels, weights)
        print(f"{name}: max relative error {error:.3e}")
        assert error > 1e-2
