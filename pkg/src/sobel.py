"""
Sobel gradients and edge-map binarization.
"""
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import DegenerateHistogram, ImageTooSmall
from .filters import quantize
from .imagebuf import FloatImage, GrayImage
from .otsu import histogram, otsu_multilevel

logger = logging.getLogger(__name__)

# Correlation kernels, exactly as printed (row index = y offset -1..1)
SOBEL_X = np.array([[-1, 0, 1],
                    [-2, 0, 2],
                    [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = np.array([[1, 2, 1],
                    [0, 0, 0],
                    [-1, -2, -1]], dtype=np.float64)


class GradientField(BaseModel):
    model_config = ConfigDict(frozen=True)

    gx: FloatImage
    gy: FloatImage
    magnitude: FloatImage


class EdgeMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    image: GrayImage  # 255 marks an edge pixel
    edge_count: int

    @model_validator(mode="after")
    def _check_binary(self):
        data = self.image.data
        if not np.all((data == 0) | (data == 255)):
            raise ValueError("edge map must be binary (0/255)")
        if int(np.count_nonzero(data)) != self.edge_count:
            raise ValueError("edge_count does not match raster")
        return self

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "EdgeMap":
        data = np.where(mask, 255, 0).astype(np.uint8)
        return cls(image=GrayImage.from_array(data), edge_count=int(np.count_nonzero(mask)))

    @property
    def width(self) -> int:
        return self.image.width

    @property
    def height(self) -> int:
        return self.image.height

    @property
    def mask(self) -> np.ndarray:
        return self.image.data == 255


def _correlate3(padded: np.ndarray, kernel: np.ndarray, h: int, w: int) -> np.ndarray:
    out = np.zeros((h, w), dtype=np.float64)
    for dy in range(3):
        for dx in range(3):
            if kernel[dy, dx]:
                out += kernel[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return out


def sobel_gradients(src: GrayImage) -> GradientField:
    """Correlate with the Sobel pair under replicate padding."""
    if src.width < 3 or src.height < 3:
        raise ImageTooSmall(f"Sobel needs at least 3x3 pixels, got {src.width}x{src.height}")
    h, w = src.height, src.width
    padded = np.pad(src.data.astype(np.float64), 1, mode="edge")
    gx = _correlate3(padded, SOBEL_X, h, w)
    gy = _correlate3(padded, SOBEL_Y, h, w)
    magnitude = np.sqrt(gx * gx + gy * gy)
    return GradientField(
        gx=FloatImage(width=w, height=h, data=gx),
        gy=FloatImage(width=w, height=h, data=gy),
        magnitude=FloatImage(width=w, height=h, data=magnitude),
    )


def binarize_edges(grad: GradientField) -> EdgeMap:
    """Rescale magnitude to [0, 255], then mark pixels above a two-class Otsu threshold."""
    magnitude = grad.magnitude
    peak = float(magnitude.data.max())
    if peak <= 0.0:
        logger.debug("Zero gradient field, empty edge map")
        return EdgeMap.from_mask(np.zeros(magnitude.data.shape, dtype=bool))

    scaled = quantize(FloatImage(width=magnitude.width, height=magnitude.height,
                                 data=magnitude.data * (255.0 / peak)))
    try:
        threshold = otsu_multilevel(histogram(scaled), 2).levels[0]
    except DegenerateHistogram:
        # constant non-zero magnitude: every pixel is an edge
        threshold = 0
    edges = EdgeMap.from_mask(scaled.data > threshold)
    logger.debug(f"Edge threshold {threshold}, {edges.edge_count} edge pixels")
    return edges
