"""
Shared fixtures for the object counter test suite.
"""
import os
import sys

import numpy as np
import pytest

# Make `src` importable when running pytest from anywhere
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.imagebuf import GrayImage, RgbImage  # noqa: E402
from src.pipeline import midpoint_circle  # noqa: E402
from src.sobel import EdgeMap  # noqa: E402


def outline_mask(width, height, circles):
    """Binary mask with the midpoint outline of every (cx, cy, r)."""
    mask = np.zeros((height, width), dtype=bool)
    for cx, cy, r in circles:
        for x, y in midpoint_circle(cx, cy, r):
            if 0 <= x < width and 0 <= y < height:
                mask[y, x] = True
    return mask


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def outline_edges():
    """Factory: EdgeMap holding rasterized circle outlines."""

    def make(width, height, circles):
        return EdgeMap.from_mask(outline_mask(width, height, circles))

    return make


@pytest.fixture
def gray_frame():
    """Factory: constant GrayImage."""

    def make(width, height, value=0):
        return GrayImage.from_array(np.full((height, width), value, dtype=np.uint8))

    return make


@pytest.fixture
def rgb_frame():
    """Factory: constant RgbImage."""

    def make(width, height, color=(128, 128, 128)):
        data = np.empty((height, width, 3), dtype=np.uint8)
        data[:] = color
        return RgbImage.from_array(data)

    return make
