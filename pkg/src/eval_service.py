"""
Evaluation service: match detections to ground truth and aggregate metrics.
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from .config import MATCH_TOLERANCE
from .corpus_service import CorpusService
from .models import DetectedCircle, EvaluationSummary, GroundTruth, ImageEvaluation
from .pipeline import run

logger = logging.getLogger(__name__)


def match_circles(truth: GroundTruth, detections: Sequence[DetectedCircle],
                  tolerance: float = MATCH_TOLERANCE) -> List[Tuple[int, int]]:
    """Greedy one-to-one matching by ascending center distance.

    A pair qualifies when the center distance and the radius difference are both
    within tolerance. Returns (truth index, detection index) pairs.
    """
    pairs = []
    for ti, (cx, cy, r) in enumerate(truth.circles):
        for di, det in enumerate(detections):
            dist = math.hypot(det.cx - cx, det.cy - cy)
            if dist <= tolerance and abs(det.radius - r) <= tolerance:
                pairs.append((dist, ti, di))
    pairs.sort()

    used_truth, used_det, matched = set(), set(), []
    for _, ti, di in pairs:
        if ti in used_truth or di in used_det:
            continue
        used_truth.add(ti)
        used_det.add(di)
        matched.append((ti, di))
    return matched


class EvaluationService(CorpusService):
    """Service for scoring the pipeline against a ground-truth corpus."""

    def evaluate(self, corpus_dir: Union[str, Path]) -> EvaluationSummary:
        """Run the pipeline over every corpus image and aggregate the metrics."""
        try:
            items = self.load(corpus_dir)
            results: List[ImageEvaluation] = []
            for item_id, image, truth in items:
                report, _ = run(image, self.config, source_id=item_id)
                matched = match_circles(truth, report.circles)
                results.append(ImageEvaluation(
                    image_id=item_id,
                    truth_count=truth.count,
                    detected_count=report.count,
                    matched=len(matched),
                    degenerate=report.degenerate,
                    stage_timings=report.stage_timings,
                ))
            summary = summarize(results)
            logger.info(
                f"Evaluated {len(results)} images: accuracy {summary.exact_count_accuracy:.4f}, "
                f"recall {summary.recall:.4f}, precision {summary.precision:.4f}"
            )
            return summary
        except Exception as e:
            logger.error(f"Failed to evaluate corpus {corpus_dir}: {e}")
            raise


def summarize(results: List[ImageEvaluation]) -> EvaluationSummary:
    """Pooled exact-count accuracy, recall, precision and mean stage timings."""
    truth_total = sum(r.truth_count for r in results)
    detected_total = sum(r.detected_count for r in results)
    matched_total = sum(r.matched for r in results)

    timings: Dict[str, List[float]] = {}
    for r in results:
        for stage, seconds in r.stage_timings.items():
            timings.setdefault(stage, []).append(seconds)

    return EvaluationSummary(
        images=results,
        exact_count_accuracy=(sum(r.exact for r in results) / len(results)) if results else 0.0,
        recall=matched_total / truth_total if truth_total else 1.0,
        precision=matched_total / detected_total if detected_total else 1.0,
        mean_stage_timings={stage: sum(v) / len(v) for stage, v in timings.items()},
    )
