"""
File formats - probability / label CSVs and per-video event JSON documents.

Contains:
- load_probability_stream / load_score_stream / write_probability_stream
- load_label_matrix / write_label_matrix
- read_events / write_events and their asyncio.to_thread variants
- canonical_events_json: the byte-stable serialization of an EventSet
- collect_files: expand files and directories into a sorted file list

Formats are described in doc/formats.md.
"""

import asyncio
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

import numpy as np
from pydantic import ValidationError

from gi_events.core.errors import EventFileError, StreamValidationError
from gi_events.core.label_space import validate_stream
from gi_events.core.schemas import (
    Event,
    EventSet,
    LabelMatrix,
    LabelSpace,
    ProbabilityStream,
    ScoreStream,
)
from gi_events.utils.constants import EVENT_FILE_SUFFIX, FRAME_COLUMN
from gi_events.utils.helpers import video_id_from_path

PathLike = Union[str, Path]


# ============================================================================
# FRAME CSV
# ============================================================================

def _parse_frame_rows(f: TextIO, path: Path, space: LabelSpace) -> List[List[float]]:
    expected = [FRAME_COLUMN, *space.class_names]
    reader = csv.DictReader(f)
    header = reader.fieldnames or []
    missing = [name for name in expected if name not in header]
    if missing:
        raise StreamValidationError(f"{path}: line 1: missing column(s) {missing}")
    extra = [name for name in header if name not in expected]
    if extra:
        raise StreamValidationError(f"{path}: line 1: unexpected column(s) {extra}")

    rows: List[List[float]] = []
    for row in reader:
        line = reader.line_num
        if None in row or any(v is None for v in row.values()):
            raise StreamValidationError(f"{path}: line {line}: wrong number of cells")
        try:
            frame = int(row[FRAME_COLUMN])
        except ValueError:
            raise StreamValidationError(
                f"{path}: line {line}: frame '{row[FRAME_COLUMN]}' is not an integer"
            ) from None
        if frame != len(rows):
            raise StreamValidationError(
                f"{path}: line {line}: expected frame {len(rows)}, got {frame}"
            )
        values = []
        for name in space.class_names:
            cell = row[name]
            try:
                values.append(float(cell))
            except ValueError:
                raise StreamValidationError(
                    f"{path}: line {line}: column '{name}': '{cell}' is not a number"
                ) from None
        rows.append(values)
    return rows


def _read_frame_csv(path: Path, space: LabelSpace) -> np.ndarray:
    """
    Parse a frame x class CSV into a float matrix.

    Header must be 'frame' followed by every class name; rows are numbered
    0..N-1 in order. Errors cite the file line.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = _parse_frame_rows(f, path, space)
    except FileNotFoundError:
        raise StreamValidationError(f"file not found: {path}") from None
    except UnicodeDecodeError:
        raise StreamValidationError(f"{path}: not valid UTF-8 text") from None

    if not rows:
        return np.zeros((0, space.num_classes), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def load_probability_stream(
    path: PathLike, space: Optional[LabelSpace] = None, video_id: Optional[str] = None
) -> ProbabilityStream:
    """
    Load and validate a probability CSV.

    Args:
        path: CSV file
        space: Label space providing the column names
        video_id: Overrides the id derived from the file name

    Returns:
        ProbabilityStream that passed validate_stream
    """
    path = Path(path)
    space = space or LabelSpace()
    stream = ProbabilityStream(
        video_id=video_id or video_id_from_path(path), probs=_read_frame_csv(path, space)
    )
    verdict = validate_stream(stream, space)
    if not verdict.ok:
        try:
            verdict.raise_for_errors()
        except StreamValidationError as e:
            raise StreamValidationError(f"{path}: {e}", e.violations) from None
    return stream


def load_score_stream(
    path: PathLike, space: Optional[LabelSpace] = None, video_id: Optional[str] = None
) -> ScoreStream:
    """Load a logit CSV (same layout as probabilities, any finite value)."""
    path = Path(path)
    space = space or LabelSpace()
    scores = _read_frame_csv(path, space)
    bad = np.argwhere(~np.isfinite(scores))
    if bad.size:
        row, col = bad[0]
        raise StreamValidationError(
            f"{path}: line {row + 2}: column '{space.name_of(int(col))}': non-finite logit"
        )
    return ScoreStream(video_id=video_id or video_id_from_path(path), scores=scores)


def load_label_matrix(
    path: PathLike, space: Optional[LabelSpace] = None, video_id: Optional[str] = None
) -> LabelMatrix:
    """Load a 0/1 label CSV with the probability-stream layout."""
    path = Path(path)
    space = space or LabelSpace()
    values = _read_frame_csv(path, space)
    bad = np.argwhere((values != 0.0) & (values != 1.0))
    if bad.size:
        row, col = bad[0]
        raise StreamValidationError(
            f"{path}: line {row + 2}: column '{space.name_of(int(col))}': "
            f"label {float(values[row, col])!r} is not 0 or 1"
        )
    return LabelMatrix(video_id=video_id or video_id_from_path(path), labels=values)


def _write_frame_csv(path: Path, matrix: np.ndarray, space: LabelSpace, cell) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([FRAME_COLUMN, *space.class_names])
        for frame, row in enumerate(matrix):
            writer.writerow([frame, *(cell(v) for v in row)])
    return path


def write_probability_stream(
    path: PathLike, stream: Union[ProbabilityStream, ScoreStream], space: Optional[LabelSpace] = None
) -> Path:
    """Write a stream as CSV; repr() keeps every float bit-exact."""
    return _write_frame_csv(Path(path), stream.matrix, space or LabelSpace(), lambda v: repr(float(v)))


def write_label_matrix(path: PathLike, labels: LabelMatrix, space: Optional[LabelSpace] = None) -> Path:
    return _write_frame_csv(Path(path), labels.labels, space or LabelSpace(), lambda v: str(int(v)))


# ============================================================================
# EVENT JSON
# ============================================================================

def events_to_document(
    event_set: EventSet, space: Optional[LabelSpace] = None, include_scores: bool = True
) -> Dict[str, Any]:
    space = space or LabelSpace()
    events = []
    for event in event_set.events:
        entry: Dict[str, Any] = {
            "label": space.name_of(event.label),
            "start_frame": event.start_frame,
            "end_frame": event.end_frame,
        }
        if include_scores and event.score is not None:
            entry["score"] = event.score
        events.append(entry)
    return {"video_id": event_set.video_id, "frame_count": event_set.frame_count, "events": events}


def canonical_events_json(
    event_set: EventSet, space: Optional[LabelSpace] = None, include_scores: bool = True
) -> str:
    """Byte-stable JSON text of an event set (fixed key order, 2-space indent)."""
    document = events_to_document(event_set, space, include_scores)
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def events_from_document(document: Any, space: Optional[LabelSpace] = None, source: str = "<document>") -> EventSet:
    """
    Build an EventSet from a parsed event document.

    Raises:
        EventFileError: naming the offending event index
    """
    space = space or LabelSpace()
    if not isinstance(document, dict):
        raise EventFileError(f"{source}: expected a JSON object")
    for key in ("video_id", "frame_count", "events"):
        if key not in document:
            raise EventFileError(f"{source}: missing '{key}'")
    if not isinstance(document["events"], list):
        raise EventFileError(f"{source}: 'events' must be a list")

    events = []
    for i, entry in enumerate(document["events"]):
        if not isinstance(entry, dict):
            raise EventFileError(f"{source}: event {i}: expected an object")
        name = entry.get("label")
        try:
            label = space.index_of(name) if isinstance(name, str) else name
        except KeyError:
            raise EventFileError(f"{source}: event {i}: unknown label '{name}'") from None
        score = entry.get("score")
        if isinstance(score, float) and not math.isfinite(score):
            raise EventFileError(f"{source}: event {i}: non-finite score")
        try:
            events.append(
                Event(
                    label=label,
                    start_frame=entry.get("start_frame"),
                    end_frame=entry.get("end_frame"),
                    score=score,
                )
            )
        except ValidationError as e:
            raise EventFileError(f"{source}: event {i}: {e.errors()[0]['msg']}") from None

    try:
        return EventSet(
            video_id=document["video_id"], frame_count=document["frame_count"], events=tuple(events)
        )
    except ValidationError as e:
        raise EventFileError(f"{source}: {e.errors()[0]['msg']}") from None


def read_events(path: PathLike, space: Optional[LabelSpace] = None) -> EventSet:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError:
        raise EventFileError(f"event file not found: {path}") from None
    except UnicodeDecodeError:
        raise EventFileError(f"{path}: not valid UTF-8 text") from None
    except json.JSONDecodeError as e:
        raise EventFileError(f"{path}: line {e.lineno}: invalid JSON ({e.msg})") from None
    return events_from_document(document, space, source=str(path))


def write_events(
    path: PathLike, event_set: EventSet, space: Optional[LabelSpace] = None, include_scores: bool = True
) -> Path:
    """Write an event set in canonical form; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(canonical_events_json(event_set, space, include_scores))
    return path


async def aread_events(path: PathLike, space: Optional[LabelSpace] = None) -> EventSet:
    return await asyncio.to_thread(read_events, path, space)


async def awrite_events(
    path: PathLike, event_set: EventSet, space: Optional[LabelSpace] = None, include_scores: bool = True
) -> Path:
    return await asyncio.to_thread(write_events, path, event_set, space, include_scores)


# ============================================================================
# PATH HELPERS
# ============================================================================

def collect_files(paths: Iterable[PathLike], suffix: str = EVENT_FILE_SUFFIX) -> List[Path]:
    """Expand directories into their files with the given suffix, sorted by name."""
    files: List[Path] = []
    for entry in paths:
        entry = Path(entry)
        if entry.is_dir():
            files.extend(sorted(p for p in entry.iterdir() if p.suffix == suffix and p.is_file()))
        else:
            files.append(entry)
    return files
