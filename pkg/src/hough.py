"""
Circle detection by 3-D Hough accumulation over (center, radius).

Every edge pixel (x, y) votes, for each radius r and each theta sample, for the
center (a, b) = (x - round(r cos t), y - round(r sin t)). numpy rounds half to
even, which is symmetric, so this equals round(x - r cos t) for integer x.
Repeated rounding onto one cell adds one vote per theta sample.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .errors import ImageTooSmall
from .models import DetectedCircle, HoughParams
from .sobel import EdgeMap

logger = logging.getLogger(__name__)


class HoughAccumulator(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    width: int
    height: int
    r_min: int
    votes: np.ndarray  # int32, shape (width, height, radii), indexed [a, b, r - r_min]

    @property
    def radii(self) -> int:
        return self.votes.shape[2]

    @property
    def total_votes(self) -> int:
        return int(self.votes.sum(dtype=np.int64))


def ideal_votes(params: HoughParams) -> int:
    """Votes a perfect circle collects at its true center and radius."""
    return params.theta_samples


def min_votes(params: HoughParams) -> int:
    """Smallest vote count whose score reaches vote_fraction."""
    ideal = float(ideal_votes(params))
    votes = math.ceil(params.vote_fraction * ideal)
    while votes > 0 and (votes - 1) / ideal >= params.vote_fraction:
        votes -= 1
    while votes / ideal < params.vote_fraction:
        votes += 1
    return votes


def circle_offsets(radius: int, theta_step: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct (dx, dy) offsets over the theta sweep with their multiplicities."""
    theta = np.deg2rad(np.arange(0, 360, theta_step, dtype=np.float64))
    dx = np.round(radius * np.cos(theta)).astype(np.int64)
    dy = np.round(radius * np.sin(theta)).astype(np.int64)
    pairs, counts = np.unique(np.stack([dx, dy], axis=1), axis=0, return_counts=True)
    return pairs[:, 0], pairs[:, 1], counts


def _radius_slice(xs: np.ndarray, ys: np.ndarray, radius: int, width: int, height: int,
                  theta_step: int) -> np.ndarray:
    """Votes for one radius as a (height, width) plane."""
    dx, dy, mult = circle_offsets(radius, theta_step)
    a = xs[:, None] - dx[None, :]
    b = ys[:, None] - dy[None, :]
    inside = (a >= 0) & (a < width) & (b >= 0) & (b < height)
    flat = (b * width + a)[inside]
    weights = np.broadcast_to(mult[None, :], inside.shape)[inside]
    plane = np.bincount(flat, weights=weights, minlength=width * height)
    return plane.astype(np.int32).reshape(height, width)


def accumulate(edges: EdgeMap, params: HoughParams, workers: int = 1) -> HoughAccumulator:
    """Fill the vote array; radius slices are independent and may run concurrently."""
    width, height = edges.width, edges.height
    if min(width, height) < 2 * params.r_min:
        raise ImageTooSmall(
            f"edge map {width}x{height} is smaller than 2*r_min ({2 * params.r_min})"
        )
    radii = params.radii
    votes = np.zeros((width, height, len(radii)), dtype=np.int32)
    ys, xs = np.nonzero(edges.mask)
    xs = xs.astype(np.int64)
    ys = ys.astype(np.int64)

    if len(xs):
        def fill(k: int) -> None:
            votes[:, :, k] = _radius_slice(xs, ys, radii[k], width, height, params.theta_step).T

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                list(executor.map(fill, range(len(radii))))
        else:
            for k in range(len(radii)):
                fill(k)

    logger.debug(
        f"Accumulated {len(xs)} edge pixels over {len(radii)} radii "
        f"({params.theta_samples} theta samples)"
    )
    return HoughAccumulator(width=width, height=height, r_min=params.r_min, votes=votes)


def _median_radius(acc: HoughAccumulator, cx: int, cy: int, threshold: int) -> int:
    """Lower median of the radii at (cx, cy) whose votes reach the threshold."""
    ks = np.flatnonzero(acc.votes[cx, cy, :] >= threshold)
    return acc.r_min + int(ks[(len(ks) - 1) // 2])


def find_circles(acc: HoughAccumulator, params: HoughParams) -> List[DetectedCircle]:
    """Threshold normalized scores, then greedy non-maximum suppression by center distance.

    Concentric edge contours give one center a plateau of passing radii; in
    "median" mode the reported radius is the lower median of that plateau.
    """
    ideal = float(ideal_votes(params))
    threshold = min_votes(params)
    a, b, k = np.nonzero(acc.votes >= threshold)
    if len(a) == 0:
        return []

    votes = acc.votes[a, b, k].astype(np.int64)
    scores = votes / ideal
    radius = k + acc.r_min
    # score descending, then smaller radius, then smaller (b, a)
    order = np.lexsort((a, b, radius, -votes))

    accepted: List[DetectedCircle] = []
    centers = np.empty((0, 2), dtype=np.float64)
    min_dist_sq = float(params.min_center_dist) ** 2
    for idx in order:
        cx, cy = int(a[idx]), int(b[idx])
        if len(centers):
            d2 = (centers[:, 0] - cx) ** 2 + (centers[:, 1] - cy) ** 2
            if np.any(d2 < min_dist_sq):
                continue
        r = int(radius[idx])
        if params.radius_mode == "median":
            r = _median_radius(acc, cx, cy, threshold)
        accepted.append(DetectedCircle(
            cx=cx, cy=cy, radius=r,
            votes=int(votes[idx]), score=float(scores[idx]),
        ))
        centers = np.vstack([centers, [cx, cy]])

    logger.debug(f"{len(a)} candidates above {params.vote_fraction}, {len(accepted)} accepted")
    return accepted


def count(edges: EdgeMap, params: HoughParams, workers: int = 1) -> Tuple[int, List[DetectedCircle]]:
    circles = find_circles(accumulate(edges, params, workers=workers), params)
    return len(circles), circles

