"""
Evaluation - temporal AP / mAP and segment-count diagnostics.

Contains:
- temporal_iou: inclusive frame interval IoU
- average_precision: greedy score-ordered matching, all-point PR area
- evaluate: pooled per-class AP, per-video and overall mAP
- segment_count_report: predicted vs GT event counts per (video, label)
- format_report / format_segment_counts: text tables
"""

from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from gi_events.core.config import EvalConfig
from gi_events.core.errors import EvaluationError
from gi_events.core.schemas import (
    EvalReport,
    Event,
    EventSet,
    LabelSpace,
    SegmentCountReport,
    SegmentCountRow,
    SegmentTotals,
)
from gi_events.utils.constants import DEFAULT_COUNT_RATIO_FLAG

# (video_id, event)
Detection = Tuple[str, Event]


# ============================================================================
# MATCHING
# ============================================================================

def temporal_iou(a: Event, b: Event) -> float:
    """Intersection over union of two inclusive frame intervals."""
    inter = min(a.end_frame, b.end_frame) - max(a.start_frame, b.start_frame) + 1
    if inter <= 0:
        return 0.0
    union = a.length + b.length - inter
    return inter / union


class _VideoTargets:
    """Ground-truth intervals of one class in one video, sorted by start."""

    def __init__(self, events: List[Event]):
        ordered = sorted(events, key=lambda e: (e.start_frame, e.end_frame))
        self.starts = np.array([e.start_frame for e in ordered], dtype=np.int64)
        self.ends = np.array([e.end_frame for e in ordered], dtype=np.int64)
        self.reach = np.maximum.accumulate(self.ends) if ordered else self.ends
        self.matched = np.zeros(len(ordered), dtype=bool)

    def claim(self, event: Event, threshold: float) -> bool:
        # Candidates: start <= event.end and (running max of ends) >= event.start
        hi = int(np.searchsorted(self.starts, event.end_frame, side="right"))
        lo = int(np.searchsorted(self.reach, event.start_frame, side="left"))
        if lo >= hi:
            return False
        starts = self.starts[lo:hi]
        ends = self.ends[lo:hi]
        inter = np.minimum(ends, event.end_frame) - np.maximum(starts, event.start_frame) + 1
        inter = np.maximum(inter, 0)
        union = (ends - starts + 1) + event.length - inter
        iou = inter / union
        usable = (~self.matched[lo:hi]) & (iou >= threshold)
        if not usable.any():
            return False
        # First maximum = earliest GT start among equal IoU
        best = int(np.argmax(np.where(usable, iou, -1.0)))
        self.matched[lo + best] = True
        return True


def _ranked(preds: Sequence[Detection]) -> List[Detection]:
    for video_id, event in preds:
        if event.score is None:
            raise EvaluationError(
                f"prediction for label {event.label} in '{video_id}' "
                f"[{event.start_frame}, {event.end_frame}] has no score"
            )
    return sorted(preds, key=lambda d: (-d[1].score, d[1].start_frame, d[0]))


def _pr_area(hits: np.ndarray, num_gt: int) -> float:
    # Recall grows by 1 / num_gt at every hit, so the area is the mean
    # interpolated precision over the hits, spread across all GT events
    tp = np.cumsum(hits)
    precision = tp / np.arange(1, hits.size + 1)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    return float(np.sum(envelope[hits == 1.0])) / num_gt


def average_precision(
    preds: Sequence[Detection], gts: Sequence[Detection], iou_threshold: float
) -> float:
    """
    AP of scored predictions of one class against its GT events.

    Args:
        preds: (video_id, event) pairs; every event must carry a score
        gts: (video_id, event) ground-truth pairs of the same class
        iou_threshold: Minimum IoU for a match

    Returns:
        Area under the all-point interpolated PR curve; 0.0 without GT or
        without predictions
    """
    ranked = _ranked(preds)
    if not gts or not ranked:
        return 0.0

    by_video: Dict[str, List[Event]] = defaultdict(list)
    for video_id, event in gts:
        by_video[video_id].append(event)
    targets = {video_id: _VideoTargets(events) for video_id, events in by_video.items()}

    hits = np.zeros(len(ranked), dtype=np.float64)
    for i, (video_id, event) in enumerate(ranked):
        target = targets.get(video_id)
        if target is not None and target.claim(event, iou_threshold):
            hits[i] = 1.0
    return _pr_area(hits, len(gts))


# ============================================================================
# CORPUS EVALUATION
# ============================================================================

def _index_sets(sets: Iterable[EventSet], role: str) -> Dict[str, EventSet]:
    indexed: Dict[str, EventSet] = {}
    for event_set in sets:
        if event_set.video_id in indexed:
            raise EvaluationError(f"duplicate {role} video id '{event_set.video_id}'")
        indexed[event_set.video_id] = event_set
    return indexed


def _detections_by_label(sets: Dict[str, EventSet]) -> Dict[int, List[Detection]]:
    grouped: Dict[int, List[Detection]] = defaultdict(list)
    for video_id in sorted(sets):
        for event in sets[video_id].events:
            grouped[event.label].append((video_id, event))
    return grouped


def _mean_ap(
    preds: Dict[int, List[Detection]], gts: Dict[int, List[Detection]], thresholds: Sequence[float]
) -> Tuple[Dict[int, Dict[float, float]], Dict[float, float]]:
    per_class = {
        label: {t: average_precision(preds.get(label, []), gts[label], t) for t in thresholds}
        for label in sorted(gts)
        if gts[label]
    }
    overall = {
        t: (float(np.mean([aps[t] for aps in per_class.values()])) if per_class else 0.0)
        for t in thresholds
    }
    return per_class, overall


def evaluate(
    pred_sets: Sequence[EventSet],
    gt_sets: Sequence[EventSet],
    cfg: Optional[EvalConfig] = None,
    space: Optional[LabelSpace] = None,
) -> EvalReport:
    """
    Temporal mAP of predictions against ground truth.

    Args:
        pred_sets: One scored EventSet per video
        gt_sets: One ground-truth EventSet per video, same video ids
        cfg: IoU thresholds and segment-count flag factor
        space: Label names used for report keys

    Returns:
        EvalReport. Classes without any GT event are left out of the means.
    """
    cfg = cfg or EvalConfig()
    space = space or LabelSpace()
    preds = _index_sets(pred_sets, "prediction")
    gts = _index_sets(gt_sets, "ground-truth")
    if set(preds) != set(gts):
        only_pred = sorted(set(preds) - set(gts))
        only_gt = sorted(set(gts) - set(preds))
        raise EvaluationError(
            f"video ids differ (only in predictions: {only_pred}, only in ground truth: {only_gt})"
        )
    unscored = sorted(vid for vid, pred in preds.items() if not pred.has_scores())
    if unscored:
        raise EvaluationError(f"prediction set(s) {unscored} hold events with no score")
    thresholds = list(cfg.iou_thresholds)

    per_class, overall = _mean_ap(_detections_by_label(preds), _detections_by_label(gts), thresholds)

    per_video = {}
    for video_id in sorted(gts):
        _, video_map = _mean_ap(
            _detections_by_label({video_id: preds[video_id]}),
            _detections_by_label({video_id: gts[video_id]}),
            thresholds,
        )
        per_video[video_id] = video_map

    return EvalReport(
        thresholds=thresholds,
        per_class_ap={space.name_of(label): aps for label, aps in per_class.items()},
        per_video_map=per_video,
        overall_map=overall,
        diagnostics=segment_count_report(pred_sets, gt_sets, space, cfg.count_ratio_flag),
    )


# ============================================================================
# SEGMENT COUNTS
# ============================================================================

def _flag(predicted: int, ground_truth: int, factor: float) -> bool:
    low, high = sorted((predicted, ground_truth))
    return high > factor * low


def segment_count_report(
    pred_sets: Sequence[EventSet],
    gt_sets: Sequence[EventSet],
    space: Optional[LabelSpace] = None,
    factor: float = DEFAULT_COUNT_RATIO_FLAG,
) -> SegmentCountReport:
    """
    Count predicted and GT events per (video, label).

    A row is flagged when the larger count exceeds factor times the smaller.
    """
    space = space or LabelSpace()
    pred_counts = {s.video_id: s.label_counts() for s in pred_sets}
    gt_counts = {s.video_id: s.label_counts() for s in gt_sets}

    rows: List[SegmentCountRow] = []
    video_totals: Dict[str, SegmentTotals] = {}
    for video_id in sorted(set(pred_counts) | set(gt_counts)):
        predicted = pred_counts.get(video_id, {})
        expected = gt_counts.get(video_id, {})
        for label in sorted(set(predicted) | set(expected)):
            p, g = predicted.get(label, 0), expected.get(label, 0)
            rows.append(
                SegmentCountRow(
                    video_id=video_id,
                    label=space.name_of(label),
                    predicted=p,
                    ground_truth=g,
                    flagged=_flag(p, g, factor),
                )
            )
        video_totals[video_id] = SegmentTotals(
            predicted=sum(predicted.values()), ground_truth=sum(expected.values())
        )

    totals = SegmentTotals(
        predicted=sum(t.predicted for t in video_totals.values()),
        ground_truth=sum(t.ground_truth for t in video_totals.values()),
    )
    return SegmentCountReport(factor=factor, rows=rows, video_totals=video_totals, totals=totals)


# ============================================================================
# TEXT RENDERING
# ============================================================================

def format_segment_counts(report: SegmentCountReport) -> str:
    lines = [f"{'video':<24} {'label':<20} {'pred':>6} {'gt':>6}  flag"]
    for row in report.rows:
        mark = "  !" if row.flagged else ""
        lines.append(f"{row.video_id:<24} {row.label:<20} {row.predicted:>6} {row.ground_truth:>6}{mark}")
    for video_id, totals in report.video_totals.items():
        lines.append(f"{video_id:<24} {'(total)':<20} {totals.predicted:>6} {totals.ground_truth:>6}")
    lines.append(f"{'(all)':<24} {'':<20} {report.totals.predicted:>6} {report.totals.ground_truth:>6}")
    lines.append(f"{len(report.flagged)} row(s) differ by more than x{report.factor:g}")
    return "\n".join(lines)


def _table_row(name: str, table: Dict[float, float], thresholds: Sequence[float], prefix: str) -> str:
    cells = "".join(f"  {table[t]:>{len(f'{prefix}@{t:g}')}.4f}" for t in thresholds)
    return f"{name:<24}{cells}"


def format_report(report: EvalReport) -> str:
    """Human-readable summary: overall, per-video and per-class tables."""
    thresholds = report.thresholds
    lines = [f"{'':<24}" + "".join(f"  mAP@{t:g}" for t in thresholds)]
    lines.append(_table_row("overall", report.overall_map, thresholds, "mAP"))
    for video_id, table in report.per_video_map.items():
        lines.append(_table_row(video_id, table, thresholds, "mAP"))
    lines.append("")
    lines.append(f"{'class':<24}" + "".join(f"  AP@{t:g}" for t in thresholds))
    for name, table in report.per_class_ap.items():
        lines.append(_table_row(name, table, thresholds, "AP"))
    return "\n".join(lines)
