import asyncio
import json

import numpy as np
import pytest

from gi_events.core.errors import EventFileError, StreamValidationError
from gi_events.core.event_io import (
    aread_events,
    awrite_events,
    canonical_events_json,
    collect_files,
    load_label_matrix,
    load_probability_stream,
    load_score_stream,
    read_events,
    write_events,
    write_label_matrix,
    write_probability_stream,
)
from gi_events.core.schemas import Event, EventSet, LabelMatrix, ProbabilityStream


def _write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ============================================================================
# PROBABILITY CSV
# ============================================================================

def test_load_well_formed_stream(tmp_path, space):
    header = ["frame", *space.class_names]
    rows = [[t] + [0.25] * 17 for t in range(3)]
    path = _write_csv(tmp_path / "ukdd_navi_00051_probs.csv", header, rows)
    stream = load_probability_stream(path, space)
    assert stream.frame_count == 3
    assert stream.video_id == "ukdd_navi_00051"
    assert np.all(stream.probs == 0.25)


def test_columns_may_come_in_any_order(tmp_path, space):
    header = ["frame", *reversed(space.class_names)]
    rows = [[0] + list(range(17))[::-1]]
    rows[0][1:] = [v / 100 for v in rows[0][1:]]
    stream = load_probability_stream(_write_csv(tmp_path / "v.csv", header, rows), space)
    assert stream.probs[0].tolist() == [c / 100 for c in range(17)]


def test_missing_column_is_named(tmp_path, space):
    header = ["frame", *space.class_names[:-1]]
    path = _write_csv(tmp_path / "v.csv", header, [[0] + [0.1] * 16])
    with pytest.raises(StreamValidationError, match="path_12"):
        load_probability_stream(path, space)


def test_extra_column_is_rejected(tmp_path, space):
    header = ["frame", *space.class_names, "extra"]
    path = _write_csv(tmp_path / "v.csv", header, [[0] + [0.1] * 18])
    with pytest.raises(StreamValidationError, match="extra"):
        load_probability_stream(path, space)


def test_out_of_range_value_cites_row(tmp_path, space):
    header = ["frame", *space.class_names]
    rows = [[t] + [0.5] * 17 for t in range(8)]
    rows[5][3] = 1.2  # column index 2 -> 'stomach'
    path = _write_csv(tmp_path / "v.csv", header, rows)
    with pytest.raises(StreamValidationError, match=r"row 5, column 'stomach'") as excinfo:
        load_probability_stream(path, space)
    assert excinfo.value.violations


def test_non_numeric_cell_cites_line(tmp_path, space):
    header = ["frame", *space.class_names]
    rows = [[t] + [0.5] * 17 for t in range(3)]
    rows[2][1] = "abc"
    path = _write_csv(tmp_path / "v.csv", header, rows)
    with pytest.raises(StreamValidationError, match=r"line 4: column 'mouth'"):
        load_probability_stream(path, space)


def test_frames_must_be_sequential(tmp_path, space):
    header = ["frame", *space.class_names]
    rows = [[0] + [0.5] * 17, [2] + [0.5] * 17]
    with pytest.raises(StreamValidationError, match="expected frame 1"):
        load_probability_stream(_write_csv(tmp_path / "v.csv", header, rows), space)


def test_short_row_is_rejected(tmp_path, space):
    header = ["frame", *space.class_names]
    path = _write_csv(tmp_path / "v.csv", header, [[0] + [0.5] * 10])
    with pytest.raises(StreamValidationError, match="line 2"):
        load_probability_stream(path, space)


def test_missing_file(tmp_path, space):
    with pytest.raises(StreamValidationError, match="not found"):
        load_probability_stream(tmp_path / "nope.csv", space)


@pytest.mark.parametrize("loader", [load_probability_stream, load_score_stream, load_label_matrix])
def test_non_utf8_csv_is_a_stream_error(tmp_path, space, loader):
    path = tmp_path / "latin_probs.csv"
    path.write_bytes(b"frame,\xff\xfe\n0,1\n")
    with pytest.raises(StreamValidationError, match="not valid UTF-8"):
        loader(path, space)


def test_probability_round_trip_is_exact(tmp_path, rng, space):
    stream = ProbabilityStream(video_id="v", probs=rng.random((25, 17)))
    path = write_probability_stream(tmp_path / "v_probs.csv", stream, space)
    loaded = load_probability_stream(path, space)
    assert np.array_equal(loaded.probs, stream.probs)
    assert loaded.video_id == "v"


def test_score_stream_accepts_any_finite_value(tmp_path, space):
    header = ["frame", *space.class_names]
    path = _write_csv(tmp_path / "v_logits.csv", header, [[0] + [-7.5] * 17])
    assert load_score_stream(path, space).scores[0, 0] == -7.5
    bad = _write_csv(tmp_path / "w_logits.csv", header, [[0] + ["inf"] * 17])
    with pytest.raises(StreamValidationError, match="non-finite"):
        load_score_stream(bad, space)


def test_label_matrix_round_trip(tmp_path, rng, space):
    labels = LabelMatrix(video_id="v", labels=rng.integers(0, 2, size=(10, 17)))
    path = write_label_matrix(tmp_path / "v_labels.csv", labels, space)
    assert np.array_equal(load_label_matrix(path, space).labels, labels.labels)

    header = ["frame", *space.class_names]
    bad = _write_csv(tmp_path / "bad_labels.csv", header, [[0] + [0.5] * 17])
    with pytest.raises(StreamValidationError, match="not 0 or 1"):
        load_label_matrix(bad, space)


# ============================================================================
# EVENT JSON
# ============================================================================

def _sample_events(scored=True):
    score = (lambda v: v) if scored else (lambda v: None)
    return EventSet(
        video_id="ukdd_navi_00051",
        frame_count=50,
        events=(
            Event(label=2, start_frame=0, end_frame=9, score=score(0.875)),
            Event(label=7, start_frame=3, end_frame=9, score=score(0.1 + 0.2)),
            Event(label=2, start_frame=10, end_frame=49, score=score(1.0)),
        ),
    )


def test_events_round_trip(tmp_path, space):
    original = _sample_events()
    path = write_events(tmp_path / "pred.json", original, space)
    assert read_events(path, space) == original


def test_ground_truth_without_scores(tmp_path, space):
    path = write_events(tmp_path / "gt.json", _sample_events(scored=False), space)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert all("score" not in e for e in document["events"])
    loaded = read_events(path, space)
    assert all(e.score is None for e in loaded.events)


def test_event_file_uses_label_names(tmp_path, space):
    path = write_events(tmp_path / "pred.json", _sample_events(), space)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert [e["label"] for e in document["events"]] == ["stomach", "path_03", "stomach"]
    assert list(document) == ["video_id", "frame_count", "events"]


def test_start_after_end_is_rejected_with_index(tmp_path, space):
    document = {
        "video_id": "v",
        "frame_count": 20,
        "events": [
            {"label": "colon", "start_frame": 0, "end_frame": 3},
            {"label": "colon", "start_frame": 9, "end_frame": 5},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    with pytest.raises(EventFileError, match="event 1"):
        read_events(path, space)


@pytest.mark.parametrize(
    "document, message",
    [
        ([], "JSON object"),
        ({"video_id": "v", "frame_count": 3}, "missing 'events'"),
        ({"video_id": "v", "frame_count": 3, "events": [{"label": "nope", "start_frame": 0, "end_frame": 0}]}, "unknown label"),
        ({"video_id": "v", "frame_count": 3, "events": [{"label": "colon", "start_frame": 0, "end_frame": 5}]}, "beyond frame_count"),
        ({"video_id": "v", "frame_count": 3, "events": [{"label": "colon", "start_frame": 0, "end_frame": 1, "score": 1.5}]}, "event 0"),
    ],
)
def test_malformed_documents(tmp_path, space, document, message):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    with pytest.raises(EventFileError, match=message):
        read_events(path, space)


def test_invalid_json_cites_line(tmp_path, space):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "video_id": "v",\n  oops\n}', encoding="utf-8")
    with pytest.raises(EventFileError, match="line 3"):
        read_events(path, space)


def test_non_utf8_event_file_is_an_event_error(tmp_path, space):
    path = tmp_path / "latin_pred.json"
    path.write_bytes(b'{"video_id": "caf\xe9", "frame_count": 1, "events": []}')
    with pytest.raises(EventFileError, match="not valid UTF-8"):
        read_events(path, space)


def test_canonical_json_is_stable(space):
    first = canonical_events_json(_sample_events(), space)
    second = canonical_events_json(_sample_events(), space)
    assert first == second
    assert first.endswith("}\n")
    assert "score" not in canonical_events_json(_sample_events(), space, include_scores=False)


def test_async_round_trip(tmp_path, space):
    original = _sample_events()

    async def scenario():
        path = await awrite_events(tmp_path / "async.json", original, space)
        return await aread_events(path, space)

    assert asyncio.run(scenario()) == original


def test_collect_files(tmp_path):
    (tmp_path / "b.json").write_text("{}", encoding="utf-8")
    (tmp_path / "a.json").write_text("{}", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("", encoding="utf-8")
    single = tmp_path / "elsewhere.json"
    files = collect_files([tmp_path, single])
    assert [f.name for f in files] == ["a.json", "b.json", "elsewhere.json"]
