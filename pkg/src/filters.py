"""
Gaussian low-pass smoothing.
"""
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import KERNEL_SIGMA_SPAN
from .errors import InvalidSigma
from .imagebuf import FloatImage, GrayImage

logger = logging.getLogger(__name__)


class GaussianKernel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: float
    radius: int
    weights: np.ndarray  # length 2*radius + 1, sums to 1


def _check_sigma(sigma) -> float:
    try:
        value = float(sigma)
    except (TypeError, ValueError):
        raise InvalidSigma(f"sigma must be a number, got {sigma!r}")
    if not (math.isfinite(value) and value > 0):
        raise InvalidSigma(f"sigma must be positive and finite, got {sigma!r}")
    return value


def build_kernel(sigma: float) -> GaussianKernel:
    """Sampled 1-D Gaussian truncated at ceil(3*sigma) and renormalized."""
    sigma = _check_sigma(sigma)
    radius = max(1, math.ceil(KERNEL_SIGMA_SPAN * sigma))
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(d * d) / (2.0 * sigma * sigma))
    weights /= weights.sum()
    weights.setflags(write=False)
    return GaussianKernel(sigma=float(sigma), radius=radius, weights=weights)


def _correlate_axis(plane: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    """Correlate along one axis with edge replication."""
    radius = (len(weights) - 1) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(plane, pad, mode="edge")
    n = plane.shape[axis]
    out = np.zeros(plane.shape, dtype=np.float64)
    for i, w in enumerate(weights):
        out += w * np.take(padded, np.arange(i, i + n), axis=axis)
    return out


def convolve_separable(src: GrayImage, kernel: GaussianKernel) -> FloatImage:
    """Horizontal pass then vertical pass, real arithmetic, no quantization."""
    plane = src.data.astype(np.float64)
    plane = _correlate_axis(plane, kernel.weights, axis=1)
    plane = _correlate_axis(plane, kernel.weights, axis=0)
    return FloatImage(width=src.width, height=src.height, data=plane)


def quantize(plane: FloatImage) -> GrayImage:
    """Round half up and clamp to 8 bits."""
    q = np.clip(np.floor(plane.data + 0.5), 0, 255)
    return GrayImage(width=plane.width, height=plane.height, data=q.astype(np.uint8))


def gaussian_blur(src: GrayImage, sigma: float) -> GrayImage:
    """Separable Gaussian blur with edge padding, quantized back to 8 bits."""
    kernel = build_kernel(sigma)
    logger.debug(f"Gaussian blur sigma={kernel.sigma} radius={kernel.radius}")
    return quantize(convolve_separable(src, kernel))
