"""
Command-line frontend: count, gen, eval.

Reports are line-oriented `key=value` records, one blank line between images.
Timing fields all start with `time.` so they can be filtered out for diffs.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .config import (
    DEFAULT_MAX_EDGE_DENSITY,
    DEFAULT_MIN_CENTER_DIST,
    DEFAULT_OTSU_CLASSES,
    DEFAULT_R_MAX,
    DEFAULT_R_MIN,
    DEFAULT_RADIUS_MODE,
    DEFAULT_SIGMA,
    DEFAULT_THETA_STEP,
    DEFAULT_VOTE_FRACTION,
    get_default_workers,
    get_log_level,
)
from .corpus_service import CorpusService
from .count_service import CountService
from .errors import EXIT_OK, EXIT_USAGE, exit_status_for
from .eval_service import EvaluationService
from .models import CountReport, EvaluationSummary, HoughParams, PipelineConfig
from .synth import PROFILES

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; usage errors here exit 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline")
    group.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    group.add_argument("--otsu-classes", type=int, choices=(2, 4), default=DEFAULT_OTSU_CLASSES)
    group.add_argument("--r-min", type=int, default=DEFAULT_R_MIN)
    group.add_argument("--r-max", type=int, default=DEFAULT_R_MAX)
    group.add_argument("--theta-step", type=int, default=DEFAULT_THETA_STEP)
    group.add_argument("--vote-fraction", type=float, default=DEFAULT_VOTE_FRACTION)
    group.add_argument("--min-center-dist", type=float, default=DEFAULT_MIN_CENTER_DIST)
    group.add_argument("--radius-mode", choices=("median", "peak"), default=DEFAULT_RADIUS_MODE)
    group.add_argument("--max-edge-density", type=float, default=DEFAULT_MAX_EDGE_DENSITY,
                       help="edge maps denser than this fall back to two classes, then count 0")
    group.add_argument("--workers", type=int, default=get_default_workers(),
                       help="concurrent images for count, radius slices for eval")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="count_objects", description="Count circular objects in PNM images.")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    count = sub.add_parser("count", help="count objects in images")
    _add_pipeline_flags(count)
    count.add_argument("--annotate", metavar="DIR")
    count.add_argument("--dump-stages", metavar="DIR")
    count.add_argument("files", nargs="+", metavar="FILE")

    gen = sub.add_parser("gen", help="generate a synthetic corpus")
    which = gen.add_mutually_exclusive_group(required=True)
    which.add_argument("--profile", choices=PROFILES)
    which.add_argument("--packet", choices=("eggs", "caps"))
    gen.add_argument("--n", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise-sigma", type=float, default=0.0, help="packet scenes only")
    gen.add_argument("--out", required=True, metavar="DIR")

    ev = sub.add_parser("eval", help="evaluate against a ground-truth corpus")
    _add_pipeline_flags(ev)
    ev.add_argument("--corpus", required=True, metavar="DIR")
    return parser


def config_from_args(args: argparse.Namespace, workers: int = 1) -> PipelineConfig:
    """Validate flag values before any pipeline work starts."""
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    return PipelineConfig(
        sigma=args.sigma,
        otsu_classes=args.otsu_classes,
        hough=HoughParams(
            r_min=args.r_min,
            r_max=args.r_max,
            theta_step=args.theta_step,
            vote_fraction=args.vote_fraction,
            min_center_dist=args.min_center_dist,
            radius_mode=args.radius_mode,
        ),
        max_edge_density=args.max_edge_density,
        workers=workers,
    )


def _flag(value: bool) -> str:
    return "true" if value else "false"


def format_report(source: str, report: CountReport) -> str:
    lines = [
        f"source={source}",
        f"count={report.count}",
        f"degenerate={_flag(report.degenerate)}",
        f"thresholds={','.join(str(t) for t in report.thresholds)}",
        f"edge_count={report.edge_count}",
        f"edge_guard={report.edge_guard}",
    ]
    lines += [f"circle={c.cx} {c.cy} {c.radius} {c.score:.6f}" for c in report.circles]
    lines += [f"time.{stage}={seconds:.6f}" for stage, seconds in report.stage_timings.items()]
    return "\n".join(lines) + "\n"


def format_evaluation(summary: EvaluationSummary) -> str:
    lines = [
        f"image={r.image_id} truth={r.truth_count} detected={r.detected_count} "
        f"matched={r.matched} exact={_flag(r.exact)} degenerate={_flag(r.degenerate)}"
        for r in summary.images
    ]
    lines += [
        "",
        f"images={len(summary.images)}",
        f"exact_count_accuracy={summary.exact_count_accuracy:.4f}",
        f"recall={summary.recall:.4f}",
        f"precision={summary.precision:.4f}",
    ]
    lines += [f"time.mean.{stage}={seconds:.6f}"
              for stage, seconds in summary.mean_stage_timings.items()]
    return "\n".join(lines) + "\n"


def cmd_count(args: argparse.Namespace) -> int:
    service = CountService(config_from_args(args))
    results = service.count_files(args.files, workers=args.workers,
                                  annotate_dir=args.annotate, dump_dir=args.dump_stages)
    status = EXIT_OK
    records = []
    for path, result in results:
        if isinstance(result, Exception):
            print(f"error: {path}: {result}", file=sys.stderr)
            status = max(status, exit_status_for(result))
        else:
            records.append(format_report(path, result))
    sys.stdout.write("\n".join(records))
    return status


def cmd_gen(args: argparse.Namespace) -> int:
    if not 0 <= args.seed < 2**64:
        raise UsageError(f"--seed must be in [0, 2**64), got {args.seed}")
    service = CorpusService()
    if args.packet:
        item_id = service.generate_packet(args.packet, args.noise_sigma, args.seed, args.out)
        print(f"wrote {item_id} to {args.out}")
        return EXIT_OK
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    ids = service.generate(args.profile, args.n, args.seed, args.out)
    print(f"wrote {len(ids)} {args.profile} images to {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    service = EvaluationService(config_from_args(args, workers=args.workers))
    sys.stdout.write(format_evaluation(service.evaluate(args.corpus)))
    return EXIT_OK


COMMANDS = {"count": cmd_count, "gen": cmd_gen, "eval": cmd_eval}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE

    if args.log_level:
        level = getattr(logging, args.log_level.upper(), logging.WARNING)
    else:
        level = get_log_level()
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s',
                        stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"error: invalid parameters: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return exit_status_for(e)
