"""
Synthetic scenes with exact ground truth.

Randomness comes from numpy's PCG64 bit generator seeded through
SeedSequence(rng_seed). Within one render the draw order is fixed: one
occlusion start angle per disk (in disk order, only when occlusion is on),
then one normal sample per channel in row-major order (only when noise is on).
Corpus item i is drawn from the i-th child of SeedSequence(rng_seed).spawn(n).
"""
import logging
import math
from typing import List, Literal, Tuple

import numpy as np

from .config import (
    CORPUS_BACKGROUND_RANGE,
    CORPUS_HEIGHT,
    CORPUS_MAX_DISKS,
    CORPUS_MAX_OCCLUSION,
    CORPUS_NOISE_SIGMA,
    CORPUS_PLACEMENT_ATTEMPTS,
    CORPUS_RIM_GAP,
    CORPUS_WIDTH,
    DEFAULT_R_MAX,
    DEFAULT_R_MIN,
    SCENE_MIN_MARGIN,
    SCENE_MIN_RIM_GAP,
)
from .errors import InvalidSpec
from .imagebuf import RgbImage
from .models import DiskSpec, GroundTruth, SceneSpec

logger = logging.getLogger(__name__)

Profile = Literal["clean", "noisy", "occluded"]
PROFILES = ("clean", "noisy", "occluded")
PacketKind = Literal["eggs", "caps"]

# Fully saturated hues (one channel at zero, S = 1)
PALETTE = [
    (220, 40, 0),
    (230, 140, 0),
    (200, 180, 0),
    (0, 160, 60),
    (0, 90, 210),
    (150, 0, 200),
    (210, 0, 90),
    (240, 100, 0),
]

EGG_COLOR = (205, 130, 60)
CAP_COLOR = (210, 25, 20)
BELT_GRAY = (190, 190, 190)


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator for an integer seed or a SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


def validate_layout(spec: SceneSpec) -> None:
    """Disks must sit inside the frame with a margin and, unless allowed, keep apart."""
    for i, d in enumerate(spec.disks):
        if (d.cx - d.radius < SCENE_MIN_MARGIN or d.cy - d.radius < SCENE_MIN_MARGIN
                or d.cx + d.radius > spec.width - 1 - SCENE_MIN_MARGIN
                or d.cy + d.radius > spec.height - 1 - SCENE_MIN_MARGIN):
            raise InvalidSpec(f"disk {i} at ({d.cx}, {d.cy}) r={d.radius} violates the "
                              f"{SCENE_MIN_MARGIN}px margin of a {spec.width}x{spec.height} frame")
    if spec.allow_overlap:
        return
    for i, p in enumerate(spec.disks):
        for j in range(i + 1, len(spec.disks)):
            q = spec.disks[j]
            if math.hypot(p.cx - q.cx, p.cy - q.cy) <= p.radius + q.radius + SCENE_MIN_RIM_GAP:
                raise InvalidSpec(f"disks {i} and {j} are closer than "
                                  f"r_i + r_j + {SCENE_MIN_RIM_GAP}")


def disk_mask(width: int, height: int, cx: int, cy: int, radius: int) -> np.ndarray:
    """Pixels with (x - cx)^2 + (y - cy)^2 <= r^2."""
    ys, xs = np.ogrid[:height, :width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius


def _occlusion_mask(width: int, height: int, disk: DiskSpec, fraction: float,
                    start: float) -> np.ndarray:
    """Circular segment cut off by the chord spanning an arc of `fraction` of the rim."""
    half = math.pi * fraction
    mid = start + half
    ux, uy = math.cos(mid), math.sin(mid)
    ys, xs = np.ogrid[:height, :width]
    depth = (xs - disk.cx) * ux + (ys - disk.cy) * uy
    return disk_mask(width, height, disk.cx, disk.cy, disk.radius) & (
        depth > disk.radius * math.cos(half))


def render(spec: SceneSpec) -> Tuple[RgbImage, GroundTruth]:
    """Rasterize a scene with its noise and occlusion, plus the ground truth."""
    validate_layout(spec)
    rng = rng_for(spec.rng_seed)
    canvas = np.empty((spec.height, spec.width, 3), dtype=np.float64)
    canvas[:] = spec.background_color

    for disk in spec.disks:
        canvas[disk_mask(spec.width, spec.height, disk.cx, disk.cy, disk.radius)] = disk.color

    if spec.occlusion_fraction > 0:
        for disk in spec.disks:
            start = rng.uniform(0.0, 2.0 * math.pi)
            mask = _occlusion_mask(spec.width, spec.height, disk, spec.occlusion_fraction, start)
            canvas[mask] = spec.background_color

    if spec.noise_sigma > 0:
        canvas += rng.normal(0.0, spec.noise_sigma, size=canvas.shape)
        canvas = np.clip(np.rint(canvas), 0, 255)

    truth = GroundTruth(circles=[(d.cx, d.cy, d.radius) for d in spec.disks])
    return RgbImage.from_array(canvas.astype(np.uint8)), truth


def _random_layout(rng: np.random.Generator, width: int, height: int) -> List[Tuple[int, int, int]]:
    """Up to 12 non-overlapping disks, radii uniform in the detection range."""
    wanted = int(rng.integers(1, CORPUS_MAX_DISKS + 1))
    placed: List[Tuple[int, int, int]] = []
    for _ in range(wanted):
        radius = int(rng.integers(DEFAULT_R_MIN, DEFAULT_R_MAX + 1))
        lo = radius + SCENE_MIN_MARGIN
        for _ in range(CORPUS_PLACEMENT_ATTEMPTS):
            cx = int(rng.integers(lo, width - lo))
            cy = int(rng.integers(lo, height - lo))
            if all(math.hypot(cx - x, cy - y) > radius + r + CORPUS_RIM_GAP for x, y, r in placed):
                placed.append((cx, cy, radius))
                break
    if not placed:
        # first disk always fits an empty frame
        raise InvalidSpec("could not place any disk")
    return placed


def corpus_spec(profile: Profile, seed) -> SceneSpec:
    """One corpus scene for a profile, drawn from a seed or SeedSequence."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}, expected one of {PROFILES}")
    rng = rng_for(seed)
    gray = int(rng.integers(CORPUS_BACKGROUND_RANGE[0], CORPUS_BACKGROUND_RANGE[1] + 1))
    layout = _random_layout(rng, CORPUS_WIDTH, CORPUS_HEIGHT)
    disks = [DiskSpec(cx=cx, cy=cy, radius=r, color=PALETTE[int(rng.integers(len(PALETTE)))])
             for cx, cy, r in layout]
    noise = CORPUS_NOISE_SIGMA if profile in ("noisy", "occluded") else 0.0
    occlusion = float(rng.uniform(0.0, CORPUS_MAX_OCCLUSION)) if profile == "occluded" else 0.0
    return SceneSpec(
        width=CORPUS_WIDTH,
        height=CORPUS_HEIGHT,
        background_color=(gray, gray, gray),
        disks=disks,
        noise_sigma=noise,
        occlusion_fraction=occlusion,
        rng_seed=int(rng.integers(0, 2**63)),
    )


def corpus(profile: Profile, n_images: int, rng_seed: int) -> List[Tuple[RgbImage, GroundTruth]]:
    """Render n_images scenes of a profile, one SeedSequence child per image."""
    if n_images < 1:
        raise ValueError(f"n_images must be >= 1, got {n_images}")
    children = np.random.SeedSequence(int(rng_seed)).spawn(n_images)
    items = [render(corpus_spec(profile, child)) for child in children]
    logger.info(f"Rendered {n_images} {profile} scenes "
                f"({sum(t.count for _, t in items)} disks, seed {rng_seed})")
    return items


def packet_spec(kind: PacketKind, noise_sigma: float = 0.0, rng_seed: int = 0) -> SceneSpec:
    """Egg packet (2x3, r=24) or bottle-cap pack (2x2, r=30) on a 256x256 belt frame."""
    if kind == "eggs":
        centers = [(x, y) for y in (88, 168) for x in (48, 128, 208)]
        radius, color = 24, EGG_COLOR
    elif kind == "caps":
        centers = [(x, y) for y in (80, 176) for x in (80, 176)]
        radius, color = 30, CAP_COLOR
    else:
        raise ValueError(f"unknown packet kind {kind!r}")
    return SceneSpec(
        width=256,
        height=256,
        background_color=BELT_GRAY,
        disks=[DiskSpec(cx=x, cy=y, radius=radius, color=color) for x, y in centers],
        noise_sigma=noise_sigma,
        rng_seed=rng_seed,
    )
