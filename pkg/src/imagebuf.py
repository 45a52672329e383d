"""
Raster types and binary PNM (P5/P6) codec.

Rasters wrap numpy arrays in row-major order: GrayImage and FloatImage hold
(height, width) arrays, RgbImage holds (height, width, 3). Arrays are copied
on construction and marked read-only.
"""
import logging
from pathlib import Path
from typing import ClassVar, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import MalformedHeader, UnsupportedMaxval, TruncatedPayload

logger = logging.getLogger(__name__)

PNM_WHITESPACE = b" \t\n\r\x0b\x0c"
PNM_MAXVAL = 255


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _as_samples(value) -> np.ndarray:
    """Coerce to uint8, rejecting anything outside [0, 255]."""
    arr = np.asarray(value)
    if arr.dtype != np.uint8:
        if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 255):
            raise ValueError("samples must lie in [0, 255]")
        if arr.size and not np.array_equal(arr, np.floor(arr)):
            raise ValueError("samples must be integers")
        arr = arr.astype(np.uint8)
    return _frozen(arr)


class _Raster(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    width: int = Field(ge=1)
    height: int = Field(ge=1)
    data: np.ndarray

    channels: ClassVar[int] = 0  # 0 means a 2-D plane

    @model_validator(mode="after")
    def _check_shape(self):
        expected = (self.height, self.width) + ((self.channels,) if self.channels else ())
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} does not match {expected}")
        return self

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr)
        if arr.ndim < 2:
            raise ValueError(f"expected a 2-D raster, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.width, self.height, self.data.tobytes()))


class GrayImage(_Raster):
    """Single-channel 8-bit raster."""

    @field_validator("data", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _as_samples(value)

    def to_rgb(self) -> "RgbImage":
        return RgbImage.from_array(np.repeat(self.data[:, :, None], 3, axis=2))


class RgbImage(_Raster):
    """Interleaved R,G,B 8-bit raster."""

    channels: ClassVar[int] = 3

    @field_validator("data", mode="before")
    @classmethod
    def _coerce(cls, value):
        return _as_samples(value)


class FloatImage(_Raster):
    """Real-valued plane for intermediate results."""

    @field_validator("data", mode="before")
    @classmethod
    def _coerce(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        return _frozen(arr)


PnmImage = Union[RgbImage, GrayImage]


def _next_token(buf: bytes, pos: int) -> Tuple[bytes, int]:
    """Return the next header token and the position just after it."""
    n = len(buf)
    while pos < n:
        if buf[pos] in PNM_WHITESPACE:
            pos += 1
        elif buf[pos:pos + 1] == b"#":
            while pos < n and buf[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and buf[pos] not in PNM_WHITESPACE and buf[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("unexpected end of header")
    return buf[start:pos], pos


def _header_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise MalformedHeader(f"non-numeric {field}: {token!r}")
    return int(token)


def read_pnm(data: bytes) -> PnmImage:
    """Decode a binary graymap (P5) or pixmap (P6) with maxval 255."""
    magic = bytes(data[:2])
    if magic not in (b"P5", b"P6"):
        raise MalformedHeader(f"bad magic {magic!r}")

    pos = 2
    if pos >= len(data) or data[pos] not in PNM_WHITESPACE and data[pos:pos + 1] != b"#":
        raise MalformedHeader("magic must be followed by whitespace")
    token, pos = _next_token(data, pos)
    width = _header_int(token, "width")
    token, pos = _next_token(data, pos)
    height = _header_int(token, "height")
    token, pos = _next_token(data, pos)
    maxval = _header_int(token, "maxval")

    if width < 1 or height < 1:
        raise MalformedHeader(f"invalid dimensions {width}x{height}")
    if maxval != PNM_MAXVAL:
        raise UnsupportedMaxval(f"maxval {maxval} (only {PNM_MAXVAL} supported)")
    if pos >= len(data) or data[pos] not in PNM_WHITESPACE:
        raise MalformedHeader("maxval must be followed by a single whitespace byte")
    pos += 1

    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise TruncatedPayload(f"expected {expected} payload bytes, got {len(payload)}")

    samples = np.frombuffer(bytes(payload), dtype=np.uint8)
    if channels == 1:
        return GrayImage(width=width, height=height, data=samples.reshape(height, width))
    return RgbImage(width=width, height=height, data=samples.reshape(height, width, 3))


def write_pnm(image: PnmImage) -> bytes:
    """Encode a raster as P5 (gray) or P6 (RGB) with maxval 255."""
    magic = "P6" if isinstance(image, RgbImage) else "P5"
    header = f"{magic}\n{image.width} {image.height}\n{PNM_MAXVAL}\n".encode("ascii")
    return header + np.ascontiguousarray(image.data, dtype=np.uint8).tobytes()


def load_pnm(path: Union[str, Path]) -> PnmImage:
    """Read and decode a PNM file."""
    path = Path(path)
    image = read_pnm(path.read_bytes())
    logger.debug(f"Loaded {path} ({image.width}x{image.height}, {type(image).__name__})")
    return image


def save_pnm(path: Union[str, Path], image: PnmImage) -> Path:
    """Encode and write a PNM file."""
    path = Path(path)
    path.write_bytes(write_pnm(image))
    logger.debug(f"Wrote {path}")
    return path
