import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gi_events.core.errors import DimensionMismatchError
from gi_events.core.gating import apply_gate
from gi_events.core.schemas import AnatomyTrack, GatingPrior, ProbabilityStream
from tests.conftest import stream_from_columns

STOMACH, COLON = 2, 4


def _prior(overrides):
    allowed = {m: frozenset(range(5)) for m in range(5, 17)}
    allowed.update({m: frozenset(a) for m, a in overrides.items()})
    return GatingPrior(allowed=allowed)


def test_permissive_prior_is_identity(rng):
    stream = ProbabilityStream(video_id="v", probs=rng.random((20, 17)))
    track = AnatomyTrack(video_id="v", labels=rng.integers(0, 5, size=20))
    gated = apply_gate(stream, track, GatingPrior.permissive())
    assert np.array_equal(gated.probs, stream.probs)


def test_empty_allowed_set_zeroes_column(rng):
    stream = ProbabilityStream(video_id="v", probs=rng.random((10, 17)))
    track = AnatomyTrack(video_id="v", labels=rng.integers(0, 5, size=10))
    gated = apply_gate(stream, track, _prior({9: set()}))
    assert np.all(gated.probs[:, 9] == 0.0)


def test_stomach_only_pathology():
    stream = stream_from_columns({STOMACH: [1.0, 0.0], COLON: [0.0, 1.0], 5: [0.8, 0.9]})
    track = AnatomyTrack(video_id="vid", labels=[STOMACH, COLON])
    gated = apply_gate(stream, track, _prior({5: {STOMACH}}))
    assert gated.probs[:, 5].tolist() == [0.8, 0.0]


def test_frame_count_mismatch():
    stream = stream_from_columns({5: [0.5, 0.5, 0.5]})
    with pytest.raises(DimensionMismatchError):
        apply_gate(stream, AnatomyTrack(video_id="vid", labels=[0, 0]), GatingPrior.permissive())


def test_prior_requires_every_pathology():
    with pytest.raises(ValueError):
        GatingPrior(allowed={5: frozenset({0})})
    with pytest.raises(ValueError):
        GatingPrior(allowed={m: frozenset({7}) for m in range(5, 17)})


_priors = st.fixed_dictionaries(
    {m: st.frozensets(st.integers(min_value=0, max_value=4)) for m in range(5, 17)}
).map(lambda allowed: GatingPrior(allowed=allowed))


@settings(max_examples=60, deadline=None)
@given(prior=_priors, seed=st.integers(min_value=0, max_value=2**31))
def test_gating_properties(prior, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 30))
    stream = ProbabilityStream(video_id="v", probs=rng.random((n, 17)))
    track = AnatomyTrack(video_id="v", labels=rng.integers(0, 5, size=n))

    once = apply_gate(stream, track, prior)
    twice = apply_gate(once, track, prior)

    assert np.all(once.probs <= stream.probs)
    assert np.array_equal(once.probs[:, :5], stream.probs[:, :5])
    assert np.array_equal(twice.probs, once.probs)
