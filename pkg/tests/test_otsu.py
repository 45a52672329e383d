"""
Histogram, exact two- and four-class Otsu search, and class-tone mapping.
"""
import numpy as np
import pytest

from src.errors import DegenerateHistogram, EmptyHistogram
from src.imagebuf import GrayImage
from src.otsu import (
    Histogram256,
    OtsuThresholds,
    apply_thresholds,
    between_class_variance,
    histogram,
    otsu_multilevel,
)

TIE_RTOL = 1e-12


def _terms(n, s, total, mu_t):
    safe = np.where(n > 0, n, 1.0)
    return np.where(n > 0, (n / total) * (s / safe - mu_t) ** 2, 0.0)


def brute_force_four(counts):
    """Scan every triple 0 <= t1 < t2 < t3 <= 254; lexicographically first best."""
    counts = np.asarray(counts, dtype=np.float64)
    c = np.cumsum(counts)
    s = np.cumsum(counts * np.arange(256))
    total, mu_t = c[-1], s[-1] / c[-1]
    t = np.arange(255)
    t2, t3 = np.meshgrid(t, t, indexing="ij")

    def grid(t1):
        score = (_terms(c[t1], s[t1], total, mu_t)
                 + _terms(c[t2] - c[t1], s[t2] - s[t1], total, mu_t)
                 + _terms(c[t3] - c[t2], s[t3] - s[t2], total, mu_t)
                 + _terms(total - c[t3], s[-1] - s[t3], total, mu_t))
        return np.where((t2 > t1) & (t3 > t2), score, -np.inf)

    row_best = np.array([grid(t1).max() for t1 in range(253)])
    best = row_best.max()
    floor = best - TIE_RTOL * abs(best)
    t1 = int(np.flatnonzero(row_best >= floor)[0])
    hit = np.argwhere(grid(t1) >= floor)[0]
    return (t1, int(hit[0]), int(hit[1])), best


def brute_force_two(counts):
    counts = np.asarray(counts, dtype=np.float64)
    c = np.cumsum(counts)
    s = np.cumsum(counts * np.arange(256))
    total, mu_t = c[-1], s[-1] / c[-1]
    t = np.arange(255)
    score = _terms(c[t], s[t], total, mu_t) + _terms(total - c[t], s[-1] - s[t], total, mu_t)
    best = score.max()
    return int(np.flatnonzero(score >= best - TIE_RTOL * abs(best))[0]), best


def random_histogram(rng):
    counts = rng.integers(0, 1000, 256)
    counts[rng.random(256) < rng.uniform(0.2, 0.9)] = 0
    counts[rng.integers(0, 256, 4)] += 1  # at least four occupied bins
    return Histogram256.from_counts(counts)


class TestHistogram:
    def test_two_by_two(self):
        hist = histogram(GrayImage.from_array(np.array([[0, 0], [255, 255]], dtype=np.uint8)))
        assert hist.counts[0] == 2 and hist.counts[255] == 2 and hist.total == 4

    def test_constant_image(self, gray_frame):
        hist = histogram(gray_frame(7, 5, 42))
        assert hist.counts[42] == 35
        assert hist.occupied.tolist() == [42]

    def test_total_is_pixel_count(self, rng):
        hist = histogram(GrayImage.from_array(rng.integers(0, 256, (31, 17), dtype=np.uint8)))
        assert hist.counts.sum() == hist.total == 31 * 17

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            Histogram256.from_counts(np.ones(255))
        with pytest.raises(ValueError):
            Histogram256(counts=np.ones(256), total=3)


class TestOtsuSearch:
    def test_bimodal_ties_break_low(self):
        counts = np.zeros(256)
        counts[50] = counts[200] = 100
        result = otsu_multilevel(Histogram256.from_counts(counts), 2)
        assert result.levels == [50]
        assert result.classes == 2

    def test_four_spikes(self):
        counts = np.zeros(256)
        counts[[30, 90, 150, 220]] = 100
        result = otsu_multilevel(Histogram256.from_counts(counts), 4)
        assert result.levels == [30, 90, 150]
        assert result.classes == 4

    def test_constant_histogram_is_degenerate(self):
        counts = np.zeros(256)
        counts[128] = 10
        with pytest.raises(DegenerateHistogram):
            otsu_multilevel(Histogram256.from_counts(counts), 2)

    def test_three_values_cannot_make_four_classes(self):
        counts = np.zeros(256)
        counts[[10, 20, 30]] = 5
        with pytest.raises(DegenerateHistogram):
            otsu_multilevel(Histogram256.from_counts(counts), 4)

    def test_exactly_four_values(self):
        counts = np.zeros(256)
        counts[[3, 4, 200, 255]] = [1, 7, 2, 9]
        assert otsu_multilevel(Histogram256.from_counts(counts), 4).levels == [3, 4, 200]

    def test_empty_histogram(self):
        with pytest.raises(EmptyHistogram):
            otsu_multilevel(Histogram256.from_counts(np.zeros(256)), 2)

    def test_unsupported_class_count(self):
        with pytest.raises(ValueError):
            otsu_multilevel(Histogram256.from_counts(np.ones(256)), 3)

    def test_variance_matches_levels(self, rng):
        hist = random_histogram(rng)
        result = otsu_multilevel(hist, 4)
        assert result.variance == pytest.approx(between_class_variance(hist, result.levels))

    def test_two_class_oracle(self, rng):
        for _ in range(200):
            hist = random_histogram(rng)
            result = otsu_multilevel(hist, 2)
            level, best = brute_force_two(hist.counts)
            assert result.levels == [level]
            assert abs(result.variance - best) <= 1e-9

    def test_four_class_oracle(self, rng):
        for _ in range(25):
            hist = random_histogram(rng)
            result = otsu_multilevel(hist, 4)
            levels, best = brute_force_four(hist.counts)
            assert tuple(result.levels) == levels
            assert abs(result.variance - best) <= 1e-9

    @pytest.mark.slow
    def test_four_class_oracle_full(self):
        rng = np.random.default_rng(1000)
        for _ in range(1000):
            hist = random_histogram(rng)
            result = otsu_multilevel(hist, 4)
            levels, best = brute_force_four(hist.counts)
            assert tuple(result.levels) == levels
            assert abs(result.variance - best) <= 1e-9


def sparse_counts(rng, lo, span):
    """Counts on 4..40 distinct bins inside [lo, lo + span)."""
    counts = np.zeros(256, dtype=np.int64)
    bins = lo + rng.choice(span, size=int(rng.integers(4, min(span, 40) + 1)), replace=False)
    counts[bins] = rng.integers(1, 1000, bins.size)
    return counts


class TestOtsuProperties:
    @pytest.mark.parametrize("k,cases", [(2, 200), (4, 100)])
    def test_shift_equivariance(self, rng, k, cases):
        for _ in range(cases):
            span = int(rng.integers(4, 200))
            lo = int(rng.integers(0, 256 - span))
            counts = sparse_counts(rng, lo, span)
            room = 255 - (lo + span - 1)
            s = int(rng.integers(1, room + 1))
            base = otsu_multilevel(Histogram256.from_counts(counts), k)
            moved = otsu_multilevel(Histogram256.from_counts(np.roll(counts, s)), k)
            assert moved.levels == [t + s for t in base.levels]

    def test_four_classes_never_explain_less(self, rng):
        for _ in range(200):
            span = int(rng.integers(4, 256))
            hist = Histogram256.from_counts(sparse_counts(rng, int(rng.integers(0, 257 - span)), span))
            two = otsu_multilevel(hist, 2)
            four = otsu_multilevel(hist, 4)
            assert four.variance >= two.variance - 1e-9


class TestApplyThresholds:
    def test_class_membership(self):
        src = GrayImage.from_array(np.array([[10, 30, 31, 90, 91, 150, 151]], dtype=np.uint8))
        t = OtsuThresholds(levels=[30, 90, 150], variance=0.0)
        assert apply_thresholds(src, t).data.tolist() == [[0, 0, 85, 85, 170, 170, 255]]

    def test_two_classes_on_black(self, gray_frame):
        t = OtsuThresholds(levels=[127], variance=0.0)
        assert not apply_thresholds(gray_frame(6, 6, 0), t).data.any()

    def test_at_most_k_tones(self, rng):
        src = GrayImage.from_array(rng.integers(0, 256, (20, 20), dtype=np.uint8))
        for k, tones in ((2, {0, 255}), (4, {0, 85, 170, 255})):
            out = apply_thresholds(src, otsu_multilevel(histogram(src), k))
            assert set(np.unique(out.data).tolist()) <= tones

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            OtsuThresholds(levels=[90, 30, 150], variance=0.0)
        with pytest.raises(ValueError):
            OtsuThresholds(levels=[10, 20], variance=0.0)
