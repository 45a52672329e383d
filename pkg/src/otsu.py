"""
Two-class and four-class Otsu thresholding.

The search maximizes the between-class variance
    sum_j w_j * (mu_j - mu_T)^2
over threshold tuples t_1 < ... < t_{k-1} in [0, 254], where class j holds the
values v with t_{j-1} < v <= t_j (t_0 = -1, t_k = 255). Cumulative count and
cumulative sum tables make each candidate O(1).

Only thresholds sitting on occupied bins are evaluated: every tuple whose
classes are all non-empty partitions the occupied bins the same way as the
tuple obtained by lowering each threshold to the largest occupied value in its
class, and that lowered tuple is the lexicographically smallest one of the
partition. The argmax over occupied-bin tuples is therefore the lexicographic
argmax over all valid tuples.
"""
import logging
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import OTSU_CLASS_TONES, OTSU_TIE_RTOL
from .errors import DegenerateHistogram, EmptyHistogram, EmptyImage
from .imagebuf import GrayImage

logger = logging.getLogger(__name__)

N_BINS = 256


class Histogram256(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    counts: np.ndarray
    total: int = Field(ge=0)

    @field_validator("counts", mode="before")
    @classmethod
    def _coerce(cls, value):
        arr = np.array(value, dtype=np.int64)
        if arr.shape != (N_BINS,):
            raise ValueError(f"histogram needs {N_BINS} bins, got shape {arr.shape}")
        if np.any(arr < 0):
            raise ValueError("histogram counts must be non-negative")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_total(self):
        if int(self.counts.sum()) != self.total:
            raise ValueError(f"total {self.total} != sum of counts {int(self.counts.sum())}")
        return self

    @classmethod
    def from_counts(cls, counts) -> "Histogram256":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts=counts, total=int(counts.sum()))

    @property
    def occupied(self) -> np.ndarray:
        return np.flatnonzero(self.counts)


class OtsuThresholds(BaseModel):
    levels: List[int]
    variance: float = Field(ge=0)

    @field_validator("levels")
    @classmethod
    def _check_levels(cls, value):
        if len(value) not in (1, 3):
            raise ValueError(f"expected 1 or 3 thresholds, got {len(value)}")
        if any(t < 0 or t > 255 for t in value):
            raise ValueError(f"thresholds must lie in [0, 255]: {value}")
        if any(a >= b for a, b in zip(value, value[1:])):
            raise ValueError(f"thresholds must be strictly increasing: {value}")
        return value

    @property
    def classes(self) -> int:
        return len(self.levels) + 1


def histogram(src: GrayImage) -> Histogram256:
    """256-bin count of sample values."""
    if src.data.size == 0:
        raise EmptyImage("cannot build a histogram of an empty image")
    counts = np.bincount(src.data.ravel(), minlength=N_BINS)
    return Histogram256(counts=counts, total=int(src.data.size))


def _cumulative(hist: Histogram256):
    counts = hist.counts.astype(np.float64)
    return np.cumsum(counts), np.cumsum(counts * np.arange(N_BINS))


def between_class_variance(hist: Histogram256, levels: Sequence[int]) -> float:
    """Between-class variance sum_j w_j (mu_j - mu_T)^2 at the given thresholds."""
    if hist.total <= 0:
        raise EmptyHistogram("histogram is empty")
    count_cum, sum_cum = _cumulative(hist)
    total = float(hist.total)
    mu_t = sum_cum[-1] / total
    bounds = [-1] + list(levels) + [N_BINS - 1]
    variance = 0.0
    for lo, hi in zip(bounds, bounds[1:]):
        n = count_cum[hi] - (count_cum[lo] if lo >= 0 else 0.0)
        if n <= 0:
            continue
        s = sum_cum[hi] - (sum_cum[lo] if lo >= 0 else 0.0)
        variance += (n / total) * (s / n - mu_t) ** 2
    return float(variance)


def _class_terms(n: np.ndarray, s: np.ndarray, total: float, mu_t: float) -> np.ndarray:
    """w * (mu - mu_T)^2 for arrays of class counts and sums; empty classes give 0."""
    safe = np.where(n > 0, n, 1.0)
    return np.where(n > 0, (n / total) * (s / safe - mu_t) ** 2, 0.0)


def _search_two(cands, count_cum, sum_cum, total, mu_t):
    n0, s0 = count_cum[cands], sum_cum[cands]
    scores = (_class_terms(n0, s0, total, mu_t)
              + _class_terms(total - n0, sum_cum[-1] - s0, total, mu_t))
    best = scores.max()
    idx = int(np.flatnonzero(scores >= best - OTSU_TIE_RTOL * abs(best))[0])
    return [int(cands[idx])]


def _search_four(cands, count_cum, sum_cum, total, mu_t):
    m = len(cands)
    n_at, s_at = count_cum[cands], sum_cum[cands]
    n_all, s_all = count_cum[-1], sum_cum[-1]

    # (j, l) grid terms that do not depend on t1: classes 3 and 4
    upper = np.triu(np.ones((m, m), dtype=bool), k=1)
    n3 = n_at[None, :] - n_at[:, None]
    s3 = s_at[None, :] - s_at[:, None]
    tail = (_class_terms(n3, s3, total, mu_t)
            + _class_terms(n_all - n_at, s_all - s_at, total, mu_t)[None, :])

    def grid(i):
        head = _class_terms(n_at[i], s_at[i], total, mu_t)
        n2 = n_at - n_at[i]
        s2 = s_at - s_at[i]
        second = _class_terms(n2, s2, total, mu_t)
        scores = head + second[:, None] + tail
        valid = upper.copy()
        valid[: i + 1, :] = False
        return np.where(valid, scores, -np.inf)

    row_best = np.full(m, -np.inf)
    for i in range(m - 2):
        row_best[i] = grid(i).max()
    best = row_best.max()
    floor = best - OTSU_TIE_RTOL * abs(best)
    i = int(np.flatnonzero(row_best >= floor)[0])
    j, l = np.argwhere(grid(i) >= floor)[0]
    return [int(cands[i]), int(cands[j]), int(cands[l])]


def otsu_multilevel(hist: Histogram256, k: int) -> OtsuThresholds:
    """Exact Otsu search for k classes (k = 2 gives 1 threshold, k = 4 gives 3)."""
    if k not in OTSU_CLASS_TONES:
        raise ValueError(f"class count must be one of {sorted(OTSU_CLASS_TONES)}, got {k}")
    if hist.total <= 0:
        raise EmptyHistogram("histogram is empty")
    occupied = hist.occupied
    if len(occupied) < k:
        raise DegenerateHistogram(f"{len(occupied)} occupied bins cannot form {k} classes")

    count_cum, sum_cum = _cumulative(hist)
    total = float(hist.total)
    mu_t = sum_cum[-1] / total
    # the largest occupied value always falls in the last class
    cands = occupied[:-1]

    if k == 2:
        levels = _search_two(cands, count_cum, sum_cum, total, mu_t)
    else:
        levels = _search_four(cands, count_cum, sum_cum, total, mu_t)

    variance = between_class_variance(hist, levels)
    logger.debug(f"Otsu k={k}: thresholds {levels}, variance {variance:.4f}")
    return OtsuThresholds(levels=levels, variance=variance)


def apply_thresholds(src: GrayImage, t: OtsuThresholds) -> GrayImage:
    """Map each pixel to its class tone; class j holds t_{j-1} < v <= t_j."""
    tones = np.array(OTSU_CLASS_TONES[t.classes], dtype=np.uint8)
    classes = np.searchsorted(np.array(t.levels), src.data, side="left")
    return GrayImage(width=src.width, height=src.height, data=tones[classes])
