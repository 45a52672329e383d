"""
Gaussian kernel and separable blur.
"""
import math

import numpy as np
import pytest

from src.errors import InvalidSigma
from src.filters import build_kernel, convolve_separable, gaussian_blur, quantize
from src.imagebuf import FloatImage, GrayImage


def direct_blur(plane, kernel):
    """Non-separable 2-D correlation with edge replication."""
    r = kernel.radius
    k2 = np.outer(kernel.weights, kernel.weights)
    padded = np.pad(plane.astype(np.float64), r, mode="edge")
    h, w = plane.shape
    out = np.zeros((h, w))
    for dy in range(2 * r + 1):
        for dx in range(2 * r + 1):
            out += k2[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return out


class TestKernel:
    @pytest.mark.parametrize("sigma", [0.3, 1.0, 1.4, 2.5, 7.0])
    def test_normalized_and_symmetric(self, sigma):
        kernel = build_kernel(sigma)
        assert kernel.radius == math.ceil(3 * sigma)
        assert len(kernel.weights) == 2 * kernel.radius + 1
        assert kernel.weights.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(kernel.weights, kernel.weights[::-1])

    def test_unit_sigma_center(self):
        kernel = build_kernel(1.0)
        assert kernel.radius == 3
        z = sum(math.exp(-d * d / 2.0) for d in range(-3, 4))
        assert kernel.weights[3] == pytest.approx(1.0 / z, rel=1e-12)

    @pytest.mark.parametrize("sigma", [0, -1.0, float("nan"), float("inf"), "wide", None])
    def test_invalid_sigma(self, sigma):
        with pytest.raises(InvalidSigma):
            build_kernel(sigma)

    def test_numpy_scalars_accepted(self):
        assert build_kernel(np.int64(2)).radius == 6


class TestBlur:
    @pytest.mark.parametrize("sigma", [0.5, 1.4, 3.0])
    def test_constant_image_is_fixed(self, gray_frame, sigma):
        src = gray_frame(12, 9, 77)
        assert gaussian_blur(src, sigma) == src

    def test_impulse_matches_direct_convolution(self):
        plane = np.zeros((9, 9), dtype=np.uint8)
        plane[4, 4] = 255
        kernel = build_kernel(1.0)
        separable = convolve_separable(GrayImage.from_array(plane), kernel)
        assert np.max(np.abs(separable.data - direct_blur(plane, kernel))) <= 1e-6

    def test_separability_on_random_images(self, rng):
        kernel = build_kernel(1.4)
        for _ in range(100):
            plane = rng.integers(0, 256, (32, 32), dtype=np.uint8)
            separable = convolve_separable(GrayImage.from_array(plane), kernel)
            assert np.max(np.abs(separable.data - direct_blur(plane, kernel))) <= 1e-6

    def test_checkerboard_averages_to_mid_gray(self):
        ys, xs = np.indices((64, 64))
        board = np.where((xs + ys) % 2 == 0, 0, 255).astype(np.uint8)
        blurred = gaussian_blur(GrayImage.from_array(board), 5.0)
        interior = blurred.data[15:49, 15:49].astype(int)
        assert np.all(np.abs(interior - 128) <= 1)

    def test_quantize_rounds_half_up_and_clamps(self):
        plane = FloatImage.from_array(np.array([[0.5, 1.49, 2.5, -3.0, 300.0]]))
        assert quantize(plane).data.tolist() == [[1, 1, 3, 0, 255]]

    def test_source_untouched(self, rng):
        src = GrayImage.from_array(rng.integers(0, 256, (10, 10), dtype=np.uint8))
        before = src.data.copy()
        gaussian_blur(src, 1.4)
        np.testing.assert_array_equal(src.data, before)

    def test_output_stays_within_input_range(self, rng):
        for _ in range(100):
            h, w = (int(v) for v in rng.integers(1, 24, 2))
            lo, hi = sorted(int(v) for v in rng.integers(0, 256, 2))
            plane = rng.integers(lo, hi + 1, (h, w), dtype=np.uint8)
            out = gaussian_blur(GrayImage.from_array(plane), float(rng.uniform(0.3, 4.0)))
            assert out.data.min() >= plane.min()
            assert out.data.max() <= plane.max()

    def test_mean_preserved_inside_a_constant_border(self, rng):
        for _ in range(50):
            sigma = float(rng.uniform(0.5, 3.0))
            border = build_kernel(sigma).radius
            inner = rng.integers(0, 256, tuple(int(v) for v in rng.integers(1, 20, 2)),
                                 dtype=np.uint8)
            plane = np.pad(inner, border, mode="constant", constant_values=int(rng.integers(0, 256)))
            out = gaussian_blur(GrayImage.from_array(plane), sigma)
            assert abs(out.data.mean() - plane.mean()) <= 0.5
