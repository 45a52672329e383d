"""
Configuration constants for the object counter.
"""
import logging
import os

# Server Configuration
DEFAULT_MCP_HOST = "0.0.0.0"
DEFAULT_MCP_PORT = 8001

# Camera geometry (conveyor camera, 1280x720 px)
FRAME_WIDTH = 1280
FRAME_HEIGHT = 720

# Gaussian filter
DEFAULT_SIGMA = 1.4
KERNEL_SIGMA_SPAN = 3  # radius = ceil(span * sigma)

# Otsu thresholding
DEFAULT_OTSU_CLASSES = 4
OTSU_CLASS_TONES = {
    2: (0, 255),
    4: (0, 85, 170, 255),
}
OTSU_TIE_RTOL = 1e-12

# Edge maps denser than this are treated as background speckle
DEFAULT_MAX_EDGE_DENSITY = 0.2

# Hough circle transform
DEFAULT_R_MIN = 10
DEFAULT_R_MAX = 60
DEFAULT_THETA_STEP = 1  # degrees
DEFAULT_VOTE_FRACTION = 0.45
DEFAULT_MIN_CENTER_DIST = 10
DEFAULT_RADIUS_MODE = "median"  # or "peak"

# Annotation
HIGHLIGHT_COLOR = (0, 255, 0)

# Synthetic corpora
CORPUS_WIDTH = 640
CORPUS_HEIGHT = 480
CORPUS_MAX_DISKS = 12
CORPUS_RIM_GAP = 24  # px between disk rims in generated layouts
CORPUS_NOISE_SIGMA = 10.0
CORPUS_MAX_OCCLUSION = 0.10
CORPUS_BACKGROUND_RANGE = (170, 220)
CORPUS_PLACEMENT_ATTEMPTS = 200
SCENE_MIN_MARGIN = 2
SCENE_MIN_RIM_GAP = 4

# Evaluation
MATCH_TOLERANCE = 3  # px, both center distance and radius difference


def get_log_level(default: str = "WARNING") -> int:
    """Get log level from environment or use default."""
    name = os.getenv("OBJCOUNT_LOG_LEVEL", default).upper()
    return getattr(logging, name, logging.WARNING)


def get_default_workers() -> int:
    """Get worker count from environment or use 1."""
    try:
        return max(1, int(os.getenv("OBJCOUNT_WORKERS", "1")))
    except ValueError:
        return 1
