import numpy as np

from gi_events.utils.helpers import (
    StructuredLogger,
    boolean_runs,
    value_runs,
    video_id_from_path,
)


def test_video_id_from_path():
    # Test cases: (input_path, expected_output)
    test_cases = [
        ("out/ukdd_navi_00051_probs.csv", "ukdd_navi_00051"),
        ("ukdd_navi_00051_gt.json", "ukdd_navi_00051"),
        ("/tmp/a/synth_000_pred.json", "synth_000"),
        ("synth_000_labels.csv", "synth_000"),
        ("video_logits.csv", "video"),
        ("plain.csv", "plain"),
        ("_probs.csv", "_probs"),  # nothing left once the suffix is removed
        ("", "unknown"),
    ]

    for path, expected in test_cases:
        result = video_id_from_path(path)
        print(f"PATH: {path:<35} | Expected: {expected:<16} | Got: {result:<16}")
        assert result == expected


def test_boolean_runs():
    test_cases = [
        ([], []),
        ([0, 0, 0], []),
        ([1, 1, 1], [(0, 2)]),
        ([1, 0, 1], [(0, 0), (2, 2)]),
        ([0, 1, 1, 0, 1], [(1, 2), (4, 4)]),
    ]
    for mask, expected in test_cases:
        assert boolean_runs(np.array(mask)) == expected


def test_value_runs_vector_and_matrix():
    assert value_runs(np.array([2, 2, 3, 2])) == [(0, 1), (2, 2), (3, 3)]
    assert value_runs(np.array([])) == []
    rows = np.array([[1, 0], [1, 0], [1, 1], [0, 0]])
    assert value_runs(rows) == [(0, 1), (2, 2), (3, 3)]


def test_value_runs_cover_every_frame(rng):
    values = rng.integers(0, 3, size=200)
    runs = value_runs(values)
    assert runs[0][0] == 0 and runs[-1][1] == 199
    for (_, end), (start, _) in zip(runs, runs[1:]):
        assert start == end + 1
        assert values[end] != values[start]


def test_structured_logger_keeps_non_debug_messages():
    log = StructuredLogger("Unit")
    log.info("first")
    log.debug("hidden")
    log.warning("second")
    log.success("third")
    logs = log.get_logs()
    assert len(logs) == 3
    assert "[Unit] INFO: first" in logs[0]
    assert "[Unit] WARN: second" in logs[1]
    assert "[Unit] OK: third" in logs[2]
