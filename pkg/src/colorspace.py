"""
RGB to HSV saturation plane.
"""
import logging

import numpy as np

from .imagebuf import GrayImage, RgbImage

logger = logging.getLogger(__name__)

SaturationPlane = GrayImage


def saturation(src: RgbImage) -> SaturationPlane:
    """Compute S = 1 - MIN/MAX (0 where MAX = 0) scaled to round(S*255), round-half-up.

    Evaluated in integer arithmetic: round(255*(MAX-MIN)/MAX) is
    floor((510*(MAX-MIN) + MAX) / (2*MAX)), so no sample depends on float rounding.
    """
    rgb = src.data.astype(np.int64)
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    denom = np.where(mx == 0, 1, mx)
    s = (510 * (mx - mn) + mx) // (2 * denom)
    s = np.where(mx == 0, 0, s)
    logger.debug(f"Saturation plane {src.width}x{src.height}, mean {s.mean():.2f}")
    return GrayImage(width=src.width, height=src.height, data=s.astype(np.uint8))
