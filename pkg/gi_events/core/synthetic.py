"""
Synthetic streams - seeded probability / label / ground-truth triples.

Contains:
- SyntheticSpec: anatomy plan, pathology bursts, noise and implausible rate
- synthesize: one video from a spec, a gating prior and a seed
- synthesize_corpus: several videos from spawned seeds
- regional_prior: a non-trivial prior used by the synthetic demo
"""

from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from gi_events.core.composition import compose_gt_style
from gi_events.core.errors import ConfigError
from gi_events.core.schemas import (
    ActivityMatrix,
    EventSet,
    GatingPrior,
    LabelMatrix,
    ProbabilityStream,
)
from gi_events.utils.constants import (
    DEFAULT_BURST_MAX_LEN,
    DEFAULT_BURST_MIN_LEN,
    DEFAULT_BURST_RATE,
    IMPLAUSIBLE_PROB_RANGE,
    NUM_ANATOMY_CLASSES,
    NUM_CLASSES,
    NUM_PATHOLOGY_CLASSES,
    SYNTHETIC_ANATOMY_FRACTIONS,
    SYNTHETIC_VIDEO_PREFIX,
)

SeedLike = Union[int, np.random.SeedSequence]


class SyntheticVideo(NamedTuple):
    stream: ProbabilityStream
    labels: LabelMatrix
    ground_truth: EventSet


# ============================================================================
# GENERATOR SETTINGS
# ============================================================================

class SyntheticSpec(BaseModel):
    """
    Generator settings for one synthetic video.

    anatomy_plan lists (anatomy index, run length) in playback order; the
    lengths must add up to frame_count.
    """

    model_config = ConfigDict(frozen=True)

    frame_count: int = Field(ge=0)
    anatomy_plan: Tuple[Tuple[int, int], ...]
    burst_rate: float = Field(default=DEFAULT_BURST_RATE, ge=0.0, le=1.0)
    burst_min_len: int = Field(default=DEFAULT_BURST_MIN_LEN, ge=1)
    burst_max_len: int = Field(default=DEFAULT_BURST_MAX_LEN, ge=1)
    noise: float = Field(default=0.0, ge=0.0, lt=1.0)
    implausible_rate: float = Field(default=0.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_plan(self) -> "SyntheticSpec":
        total = 0
        for anatomy, length in self.anatomy_plan:
            if not 0 <= anatomy < NUM_ANATOMY_CLASSES:
                raise ValueError(f"anatomy_plan: invalid anatomy index {anatomy}")
            if length < 1:
                raise ValueError(f"anatomy_plan: run length must be positive, got {length}")
            total += length
        if total != self.frame_count:
            raise ValueError(f"anatomy_plan lengths sum to {total}, frame_count is {self.frame_count}")
        if self.burst_max_len < self.burst_min_len:
            raise ValueError("burst_max_len must not be below burst_min_len")
        return self

    @classmethod
    def with_default_plan(cls, frame_count: int, **kwargs) -> "SyntheticSpec":
        """
        Visit every anatomy once in anatomical order with fixed fractions.

        Each run gets at least 2 frames; the longest run absorbs rounding.
        """
        if frame_count < 2 * NUM_ANATOMY_CLASSES:
            raise ConfigError(f"default plan needs at least {2 * NUM_ANATOMY_CLASSES} frames")
        lengths = [max(2, int(round(f * frame_count))) for f in SYNTHETIC_ANATOMY_FRACTIONS]
        longest = int(np.argmax(lengths))
        lengths[longest] += frame_count - sum(lengths)
        plan = tuple((anatomy, length) for anatomy, length in enumerate(lengths))
        try:
            return cls(frame_count=frame_count, anatomy_plan=plan, **kwargs)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(map(str, err['loc'])) or 'settings'}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(f"invalid synthetic settings: {problems}") from None

    @property
    def mean_burst_len(self) -> float:
        return (self.burst_min_len + self.burst_max_len) / 2.0


def regional_prior() -> GatingPrior:
    """Each pathology allowed in two anatomies; the rest of the tract is excluded."""
    allowed = {}
    for i in range(NUM_PATHOLOGY_CLASSES):
        allowed[NUM_ANATOMY_CLASSES + i] = frozenset({i % NUM_ANATOMY_CLASSES, (i + 2) % NUM_ANATOMY_CLASSES})
    return GatingPrior(allowed=allowed)


# ============================================================================
# GENERATION
# ============================================================================

def _anatomy_track(spec: SyntheticSpec) -> np.ndarray:
    if not spec.anatomy_plan:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([np.full(length, anatomy, dtype=np.int64) for anatomy, length in spec.anatomy_plan])


def _bursts(rng: np.random.Generator, n: int, rate: float, min_len: int, max_len: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    starts = np.flatnonzero(rng.random(n) < rate)
    lengths = rng.integers(min_len, max_len + 1, size=starts.size)
    for start, length in zip(starts, lengths):
        mask[start : start + length] = True
    return mask


def synthesize(
    spec: SyntheticSpec,
    prior: Optional[GatingPrior] = None,
    seed: SeedLike = 0,
    video_id: str = f"{SYNTHETIC_VIDEO_PREFIX}_000",
) -> SyntheticVideo:
    """
    Generate one video.

    True pathology bursts only cover frames where the prior allows them.
    Implausible detections are injected only where it does not, and never
    change the labels.

    Args:
        spec: Generator settings
        prior: Gating prior; permissive when omitted
        seed: Integer seed or SeedSequence
        video_id: Id stamped on all three outputs

    Returns:
        SyntheticVideo(stream, labels, ground_truth)
    """
    prior = prior or GatingPrior.permissive()
    rng = np.random.default_rng(seed)
    n = spec.frame_count
    anatomy = _anatomy_track(spec)
    allowed = prior.mask()[:, anatomy].T  # N x 12

    labels = np.zeros((n, NUM_CLASSES), dtype=np.uint8)
    labels[np.arange(n), anatomy] = 1
    injected = np.zeros((n, NUM_PATHOLOGY_CLASSES), dtype=bool)
    implausible_start = spec.implausible_rate / spec.mean_burst_len
    for i in range(NUM_PATHOLOGY_CLASSES):
        true = _bursts(rng, n, spec.burst_rate, spec.burst_min_len, spec.burst_max_len)
        labels[:, NUM_ANATOMY_CLASSES + i] = true & allowed[:, i]
        fake = _bursts(rng, n, implausible_start, spec.burst_min_len, spec.burst_max_len)
        injected[:, i] = fake & ~allowed[:, i]

    jitter = spec.noise * rng.random((n, NUM_CLASSES))
    probs = np.where(labels == 1, 1.0 - jitter, jitter)
    low, high = IMPLAUSIBLE_PROB_RANGE
    fake_probs = rng.uniform(low, high, size=(n, NUM_PATHOLOGY_CLASSES))
    probs[:, NUM_ANATOMY_CLASSES:] = np.where(injected, fake_probs, probs[:, NUM_ANATOMY_CLASSES:])

    activity = ActivityMatrix(video_id=video_id, active=labels)
    return SyntheticVideo(
        stream=ProbabilityStream(video_id=video_id, probs=probs),
        labels=LabelMatrix(video_id=video_id, labels=labels),
        ground_truth=compose_gt_style(activity),
    )


def synthesize_corpus(
    spec: SyntheticSpec,
    prior: Optional[GatingPrior] = None,
    n_videos: int = 3,
    seed: int = 0,
) -> List[SyntheticVideo]:
    """Generate n_videos videos from independent child seeds of one root seed."""
    if n_videos < 0:
        raise ConfigError(f"n_videos must be non-negative, got {n_videos}")
    children = np.random.SeedSequence(seed).spawn(n_videos)
    return [
        synthesize(spec, prior, child, video_id=f"{SYNTHETIC_VIDEO_PREFIX}_{i:03d}")
        for i, child in enumerate(children)
    ]
