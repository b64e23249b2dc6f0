"""
Command-line entry points.

Contains:
- decode: probability / logit CSVs -> scored event files
- eval: prediction vs ground-truth event files -> mAP report
- debug: segment-count report for the same inputs
- weights: label CSV -> clipped class weights
- loss: weighted BCE and focal loss of a stream against its labels
- synth: seeded synthetic corpus on disk

Exit status is 0 on success, 1 on any toolkit or file error, 2 on usage errors.
"""

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from gi_events.core.config import RunConfig, load_run_config
from gi_events.core.errors import ConfigError, GIEventsError
from gi_events.core.evaluation import (
    evaluate,
    format_report,
    format_segment_counts,
    segment_count_report,
)
from gi_events.core.event_io import (
    aread_events,
    awrite_events,
    collect_files,
    load_label_matrix,
    load_probability_stream,
    load_score_stream,
    write_events,
    write_label_matrix,
    write_probability_stream,
)
from gi_events.core.losses import class_weights, focal_loss, gradient_check, sigmoid, weighted_bce
from gi_events.core.schemas import ClassCounts, EventSet, LabelSpace, ProbabilityStream
from gi_events.core.synthetic import SyntheticSpec, regional_prior, synthesize_corpus
from gi_events.graph.pipeline_engine import decode_corpus
from gi_events.utils.constants import DEFAULT_BURST_RATE
from gi_events.utils.helpers import StructuredLogger, configure_logging


# ============================================================================
# PARSER
# ============================================================================

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="Run configuration JSON")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gi_events",
        description="Temporal event decoding and evaluation for GI video frame classifiers.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    decode = commands.add_parser("decode", help="Decode probability streams into event files")
    _add_common(decode)
    decode.add_argument("streams", nargs="+", type=Path, help="Probability (or logit) CSV files")
    decode.add_argument("-o", "--output", type=Path, required=True, help="Output directory")
    decode.add_argument("--logits", action="store_true", help="Inputs hold logits, not probabilities")
    decode.add_argument("--no-gating", action="store_true", help="Disable anatomy gating")
    decode.add_argument("--composition", choices=["gt_style", "per_label"], default=None)
    decode.add_argument("--vote-radius", type=int, default=None)
    decode.add_argument("--decoder", choices=["hysteresis", "viterbi"], default=None)
    decode.add_argument("--t-on", type=float, default=None)
    decode.add_argument("--t-off", type=float, default=None)
    decode.add_argument("--min-len", type=int, default=None)
    decode.add_argument("--stay-prob", type=float, default=None)
    decode.add_argument("--temperature", type=float, default=None)

    for name, help_text in (("eval", "Temporal mAP of predictions"), ("debug", "Segment-count report")):
        sub = commands.add_parser(name, help=help_text)
        _add_common(sub)
        sub.add_argument("--pred", nargs="+", type=Path, required=True, help="Prediction files or directories")
        sub.add_argument("--gt", nargs="+", type=Path, required=True, help="Ground-truth files or directories")
        sub.add_argument("--report", type=Path, default=None, help="Write the report as JSON")
        sub.add_argument("--factor", type=float, default=None, help="Count ratio that flags a row")
        if name == "eval":
            sub.add_argument("--thresholds", nargs="+", type=float, default=None, help="IoU thresholds")

    weights = commands.add_parser("weights", help="Clipped class weights from a label CSV")
    _add_common(weights)
    weights.add_argument("labels", type=Path, help="Label CSV (0/1 per frame and class)")
    weights.add_argument("--w-min", type=float, default=None)
    weights.add_argument("--w-max", type=float, default=None)
    weights.add_argument("-o", "--output", type=Path, default=None, help="Write weights JSON here")

    loss = commands.add_parser("loss", help="Weighted BCE and focal loss of a stream against labels")
    _add_common(loss)
    loss.add_argument("labels", type=Path, help="Label CSV (0/1 per frame and class)")
    loss.add_argument("stream", type=Path, help="Probability (or logit) CSV for the same frames")
    loss.add_argument("--logits", action="store_true", help="Stream holds logits; also runs the gradient check")
    loss.add_argument("--w-min", type=float, default=None)
    loss.add_argument("--w-max", type=float, default=None)
    loss.add_argument("--gamma", type=float, default=None, help="Focal exponent")
    loss.add_argument("--focal-variant", choices=["as_printed", "standard"], default=None)
    loss.add_argument("-o", "--output", type=Path, default=None, help="Write the loss report JSON here")

    synth = commands.add_parser("synth", help="Write a seeded synthetic corpus")
    _add_common(synth)
    synth.add_argument("-o", "--output", type=Path, required=True, help="Output directory")
    synth.add_argument("--frames", type=int, default=2000)
    synth.add_argument("--videos", type=int, default=3)
    synth.add_argument("--noise", type=float, default=0.0)
    synth.add_argument("--implausible-rate", type=float, default=0.0)
    synth.add_argument("--burst-rate", type=float, default=DEFAULT_BURST_RATE)
    synth.add_argument("--seed", type=int, default=None, help="Overrides the config seed")
    synth.add_argument(
        "--regional-prior", action="store_true",
        help="Use the built-in regional prior instead of the configured one",
    )
    return parser


# ============================================================================
# COMMANDS
# ============================================================================

def _run_config(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config)
    if args.command == "decode":
        config = config.with_overrides(
            gating_enabled=False if args.no_gating else None,
            composition=args.composition,
            vote_radius=args.vote_radius,
            decoder=args.decoder,
            t_on=args.t_on,
            t_off=args.t_off,
            min_len=args.min_len,
            stay_prob=args.stay_prob,
            temperature=args.temperature,
        )
    elif args.command in ("eval", "debug"):
        config = config.with_overrides(
            eval_thresholds=tuple(args.thresholds) if getattr(args, "thresholds", None) else None,
            count_ratio_flag=args.factor,
        )
    elif args.command == "weights":
        config = config.with_overrides(w_min=args.w_min, w_max=args.w_max)
    elif args.command == "loss":
        config = config.with_overrides(
            w_min=args.w_min, w_max=args.w_max, gamma=args.gamma, focal_variant=args.focal_variant
        )
    elif args.command == "synth":
        config = config.with_overrides(seed=args.seed)
    return config


def cmd_decode(args: argparse.Namespace, config: RunConfig) -> int:
    log = StructuredLogger("Decode")
    settings = config.to_settings()
    load = load_score_stream if args.logits else load_probability_stream
    streams = [load(path, settings.space) for path in args.streams]
    seen = {}
    for path, stream in zip(args.streams, streams):
        if stream.video_id in seen:
            raise ConfigError(
                f"duplicate video id '{stream.video_id}': {seen[stream.video_id]} and {path}"
            )
        seen[stream.video_id] = path

    results = asyncio.run(decode_corpus(streams, settings))

    async def write_all() -> List[Path]:
        return await asyncio.gather(*(
            awrite_events(args.output / f"{r.video_id}_pred.json", r.events, settings.space)
            for r in results
        ))

    for path in asyncio.run(write_all()):
        log.info(f"wrote {path}")
    return 0


def _read_sets(paths: Sequence[Path], space: LabelSpace) -> List[EventSet]:
    async def read_all() -> List[EventSet]:
        return await asyncio.gather(*(aread_events(p, space) for p in collect_files(paths)))

    return list(asyncio.run(read_all()))


def cmd_eval(args: argparse.Namespace, config: RunConfig) -> int:
    space = config.resolve_label_space()
    report = evaluate(
        _read_sets(args.pred, space), _read_sets(args.gt, space), config.eval_config(), space
    )
    print(format_report(report))
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_debug(args: argparse.Namespace, config: RunConfig) -> int:
    space = config.resolve_label_space()
    report = segment_count_report(
        _read_sets(args.pred, space), _read_sets(args.gt, space), space, config.count_ratio_flag
    )
    print(format_segment_counts(report))
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_weights(args: argparse.Namespace, config: RunConfig) -> int:
    space = config.resolve_label_space()
    labels = load_label_matrix(args.labels, space)
    weights = class_weights(ClassCounts.from_labels(labels), config.loss.w_min, config.loss.w_max)
    _write_json({name: w for name, w in zip(space.class_names, weights.weights)}, args.output)
    return 0


def _write_json(document: dict, output: Optional[Path]) -> None:
    text = json.dumps(document, indent=2) + "\n"
    if output:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_loss(args: argparse.Namespace, config: RunConfig) -> int:
    space = config.resolve_label_space()
    labels = load_label_matrix(args.labels, space)
    weights = class_weights(ClassCounts.from_labels(labels), config.loss.w_min, config.loss.w_max)
    epsilon = config.loss.epsilon
    focal = config.focal_config()

    document: dict = {"video_id": labels.video_id}
    if args.logits:
        scores = load_score_stream(args.stream, space, video_id=labels.video_id)
        probs = ProbabilityStream(video_id=scores.video_id, probs=sigmoid(scores.scores))
    else:
        probs = load_probability_stream(args.stream, space, video_id=labels.video_id)
    bce = weighted_bce(probs, labels, weights, epsilon)
    document["weighted_bce"] = {
        "per_class": {name: float(v) for name, v in zip(space.class_names, bce.per_class)},
        "total": bce.total,
    }
    document["focal"] = {
        "gamma": focal.gamma,
        "variant": focal.variant,
        "total": focal_loss(probs, labels, weights, focal, epsilon),
    }
    if args.logits:
        document["gradient_check"] = gradient_check(scores, labels, weights, epsilon=epsilon)
    _write_json(document, args.output)
    return 0


def cmd_synth(args: argparse.Namespace, config: RunConfig) -> int:
    log = StructuredLogger("Synth")
    settings = config.to_settings()
    prior = regional_prior() if args.regional_prior else settings.prior
    spec = SyntheticSpec.with_default_plan(
        args.frames,
        noise=args.noise,
        implausible_rate=args.implausible_rate,
        burst_rate=args.burst_rate,
    )
    videos = synthesize_corpus(spec, prior, args.videos, config.seed)
    for video in videos:
        vid = video.stream.video_id
        write_probability_stream(args.output / f"{vid}_probs.csv", video.stream, settings.space)
        write_label_matrix(args.output / f"{vid}_labels.csv", video.labels, settings.space)
        write_events(args.output / f"{vid}_gt.json", video.ground_truth, settings.space)
        log.info(f"{vid}: {len(video.ground_truth.events)} ground-truth events")
    return 0


COMMANDS = {
    "decode": cmd_decode,
    "eval": cmd_eval,
    "debug": cmd_debug,
    "weights": cmd_weights,
    "loss": cmd_loss,
    "synth": cmd_synth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else "INFO")
    try:
        config = _run_config(args)
        return COMMANDS[args.command](args, config)
    except (GIEventsError, ValidationError, OSError) as e:
        print(f"gi_events {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
