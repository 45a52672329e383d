# src/models.py

from pydantic import BaseModel, Field, model_validator
from typing import Annotated, List, Dict, Literal, Tuple

from .config import (
    DEFAULT_SIGMA,
    DEFAULT_OTSU_CLASSES,
    DEFAULT_R_MIN,
    DEFAULT_R_MAX,
    DEFAULT_THETA_STEP,
    DEFAULT_VOTE_FRACTION,
    DEFAULT_MIN_CENTER_DIST,
    DEFAULT_RADIUS_MODE,
    DEFAULT_MAX_EDGE_DENSITY,
)

Channel = Annotated[int, Field(ge=0, le=255)]
RgbColor = Tuple[Channel, Channel, Channel]

# --- Detection Models ---

class HoughParams(BaseModel):
    r_min: int = Field(default=DEFAULT_R_MIN, ge=1)
    r_max: int = Field(default=DEFAULT_R_MAX, ge=1)
    theta_step: int = Field(default=DEFAULT_THETA_STEP, ge=1, le=360)  # degrees
    vote_fraction: float = Field(default=DEFAULT_VOTE_FRACTION, gt=0, le=1)
    min_center_dist: float = Field(default=DEFAULT_MIN_CENTER_DIST, ge=1)
    radius_mode: Literal["median", "peak"] = DEFAULT_RADIUS_MODE

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.r_min > self.r_max:
            raise ValueError(f"r_min ({self.r_min}) must not exceed r_max ({self.r_max})")
        if 360 % self.theta_step:
            raise ValueError(f"theta_step ({self.theta_step}) must divide 360")
        return self

    @property
    def radii(self) -> List[int]:
        return list(range(self.r_min, self.r_max + 1))

    @property
    def theta_samples(self) -> int:
        return 360 // self.theta_step


class DetectedCircle(BaseModel):
    cx: int
    cy: int
    radius: int
    votes: int = Field(ge=0)
    score: float = Field(ge=0)

# --- Pipeline Models ---

class PipelineConfig(BaseModel):
    sigma: float = Field(default=DEFAULT_SIGMA, gt=0)
    otsu_classes: Literal[2, 4] = DEFAULT_OTSU_CLASSES
    hough: HoughParams = Field(default_factory=HoughParams)
    dump_stages: bool = False
    max_edge_density: float = Field(default=DEFAULT_MAX_EDGE_DENSITY, gt=0, le=1)
    workers: int = Field(default=1, ge=1)  # radius slices accumulated concurrently


class CountReport(BaseModel):
    source_id: str
    count: int = Field(ge=0)
    circles: List[DetectedCircle] = []
    stage_timings: Dict[str, float] = {}  # seconds, pipeline order
    degenerate: bool = False
    thresholds: List[int] = []
    edge_count: int = 0
    edge_guard: Literal["none", "two_class", "rejected"] = "none"

    @model_validator(mode="after")
    def _check_count(self):
        if self.count != len(self.circles):
            raise ValueError(f"count {self.count} does not match {len(self.circles)} circles")
        return self

# --- Synthetic Scene Models ---

class DiskSpec(BaseModel):
    cx: int
    cy: int
    radius: int = Field(ge=1)
    color: RgbColor


class SceneSpec(BaseModel):
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    background_color: RgbColor = (128, 128, 128)
    disks: List[DiskSpec] = []
    noise_sigma: float = Field(default=0.0, ge=0)
    occlusion_fraction: float = Field(default=0.0, ge=0, lt=0.5)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    allow_overlap: bool = False


class GroundTruth(BaseModel):
    circles: List[Tuple[int, int, int]] = []  # (cx, cy, radius)

    @property
    def count(self) -> int:
        return len(self.circles)

# --- Evaluation Models ---

class ImageEvaluation(BaseModel):
    image_id: str
    truth_count: int
    detected_count: int
    matched: int
    degenerate: bool = False
    stage_timings: Dict[str, float] = {}

    @property
    def exact(self) -> bool:
        return self.truth_count == self.detected_count


class EvaluationSummary(BaseModel):
    images: List[ImageEvaluation]
    exact_count_accuracy: float
    recall: float
    precision: float
    mean_stage_timings: Dict[str, float] = {}
