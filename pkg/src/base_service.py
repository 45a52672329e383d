"""
Base counter service with shared pipeline configuration and image I/O.
"""
import logging
from pathlib import Path
from typing import Optional, Union

from .imagebuf import PnmImage, load_pnm, save_pnm
from .models import PipelineConfig

logger = logging.getLogger(__name__)


class BaseCounterService:
    """Base service class holding the pipeline configuration shared by all services."""

    def __init__(self, config: Optional[PipelineConfig] = None):
        """Use the given configuration or the defaults."""
        self.config = config or PipelineConfig()

    def load_image(self, path: Union[str, Path]) -> PnmImage:
        """Read a PNM file from disk."""
        try:
            return load_pnm(path)
        except Exception as e:
            logger.error(f"Failed to load image {path}: {e}")
            raise

    def save_image(self, path: Union[str, Path], image: PnmImage) -> Path:
        """Write a PNM file to disk."""
        try:
            return save_pnm(path, image)
        except Exception as e:
            logger.error(f"Failed to write image {path}: {e}")
            raise
