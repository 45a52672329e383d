"""
End-to-end counting pipeline.

Stages, in order:
    1 intake      accept the frame (gray frames are replicated to RGB)
    2 saturation  HSV S channel
    3 blur        Gaussian smoothing
    4 histogram   256-bin intensity histogram
    5 threshold   multilevel Otsu + class tones
    6 sobel       gradient field of the thresholded image
    7 edges       binary edge map
    8 hough       accumulation, peak finding, count
"""
import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from .colorspace import saturation
from .config import HIGHLIGHT_COLOR
from .errors import DegenerateHistogram
from .filters import gaussian_blur
from .hough import count as hough_count
from .imagebuf import GrayImage, PnmImage, RgbImage, save_pnm
from .models import CountReport, DetectedCircle, PipelineConfig
from .otsu import Histogram256, OtsuThresholds, apply_thresholds, histogram, otsu_multilevel
from .sobel import EdgeMap, binarize_edges, sobel_gradients

logger = logging.getLogger(__name__)

STAGES = ("intake", "saturation", "blur", "histogram", "threshold", "sobel", "edges", "hough")
ANNOTATED_STAGE = 8


class StageDump(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    images: Dict[int, Union[RgbImage, GrayImage]]

    @staticmethod
    def filename(source_id: str, stage: int, image: PnmImage) -> str:
        ext = "ppm" if isinstance(image, RgbImage) else "pgm"
        return f"{source_id}.stage{stage}.{ext}"

    def write(self, out_dir: Union[str, Path], source_id: str) -> List[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return [save_pnm(out_dir / self.filename(source_id, stage, image), image)
                for stage, image in sorted(self.images.items())]


@contextmanager
def _stage(timings: Dict[str, float], name: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def midpoint_circle(cx: int, cy: int, radius: int) -> List[Tuple[int, int]]:
    """Outline pixels of a circle by the midpoint algorithm, deduplicated and sorted."""
    points = set()
    x, y, err = radius, 0, 1 - radius
    while x >= y:
        for px, py in ((x, y), (y, x), (-y, x), (-x, y), (-x, -y), (-y, -x), (y, -x), (x, -y)):
            points.add((cx + px, cy + py))
        y += 1
        if err < 0:
            err += 2 * y + 1
        else:
            x -= 1
            err += 2 * (y - x) + 1
    return sorted(points)


def annotate(src: RgbImage, circles: List[DetectedCircle]) -> RgbImage:
    """Draw each detection outline and a 3x3 center marker in the highlight color."""
    canvas = np.array(src.data, copy=True)
    color = np.array(HIGHLIGHT_COLOR, dtype=np.uint8)
    h, w = canvas.shape[:2]
    for circle in circles:
        marker = [(circle.cx + dx, circle.cy + dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]
        for x, y in midpoint_circle(circle.cx, circle.cy, circle.radius) + marker:
            if 0 <= x < w and 0 <= y < h:
                canvas[y, x] = color
    return RgbImage(width=src.width, height=src.height, data=canvas)


def _segment(blurred: GrayImage, hist: Histogram256, classes: int,
             timings: Dict[str, float]) -> Tuple[OtsuThresholds, GrayImage, EdgeMap]:
    with _stage(timings, "threshold"):
        thresholds = otsu_multilevel(hist, classes)
        toned = apply_thresholds(blurred, thresholds)
    with _stage(timings, "sobel"):
        grad = sobel_gradients(toned)
    with _stage(timings, "edges"):
        edges = binarize_edges(grad)
    return thresholds, toned, edges


def edge_density(edges: EdgeMap) -> float:
    return edges.edge_count / (edges.width * edges.height)


def run(src: PnmImage, cfg: PipelineConfig,
        source_id: str = "frame") -> Tuple[CountReport, Optional[StageDump]]:
    """Count circular objects in one frame.

    An edge map denser than ``cfg.max_edge_density`` means the thresholds split
    a flat, noisy background. Four-class runs then retry with two classes; if
    the map is still too dense the frame is counted as empty.
    """
    timings: Dict[str, float] = {}
    dumps: Dict[int, PnmImage] = {}

    with _stage(timings, "intake"):
        rgb = src.to_rgb() if isinstance(src, GrayImage) else src
    with _stage(timings, "saturation"):
        sat = saturation(rgb)
    with _stage(timings, "blur"):
        blurred = gaussian_blur(sat, cfg.sigma)
    with _stage(timings, "histogram"):
        hist = histogram(blurred)
    if cfg.dump_stages:
        dumps[2], dumps[3] = sat, blurred

    try:
        thresholds, toned, edges = _segment(blurred, hist, cfg.otsu_classes, timings)
    except DegenerateHistogram as e:
        logger.info(f"{source_id}: degenerate histogram ({e}), nothing to count")
        if cfg.dump_stages:
            dumps[ANNOTATED_STAGE] = annotate(rgb, [])
        report = CountReport(source_id=source_id, count=0, circles=[],
                             stage_timings=timings, degenerate=True)
        return report, (StageDump(images=dumps) if cfg.dump_stages else None)

    guard = "none"
    if edge_density(edges) > cfg.max_edge_density and cfg.otsu_classes > 2:
        logger.info(f"{source_id}: edge density {edge_density(edges):.3f} with thresholds "
                    f"{thresholds.levels}, retrying with two classes")
        thresholds, toned, edges = _segment(blurred, hist, 2, timings)
        guard = "two_class"

    with _stage(timings, "hough"):
        if edge_density(edges) > cfg.max_edge_density:
            logger.warning(f"{source_id}: edge density {edge_density(edges):.3f} exceeds "
                           f"{cfg.max_edge_density}, not counting")
            guard = "rejected"
            n, circles = 0, []
        else:
            n, circles = hough_count(edges, cfg.hough, workers=cfg.workers)

    if cfg.dump_stages:
        dumps[5], dumps[7] = toned, edges.image
        dumps[ANNOTATED_STAGE] = annotate(rgb, circles)

    logger.info(
        f"{source_id}: {n} objects (thresholds {thresholds.levels}, {edges.edge_count} edge pixels)"
    )
    report = CountReport(
        source_id=source_id,
        count=n,
        circles=circles,
        stage_timings=timings,
        degenerate=False,
        thresholds=thresholds.levels,
        edge_count=edges.edge_count,
        edge_guard=guard,
    )
    return report, (StageDump(images=dumps) if cfg.dump_stages else None)
