"""
Unified object counter service combining all domain-specific services.
"""
import logging
from typing import Any, Dict, Optional

from .base_service import BaseCounterService
from .count_service import CountService
from .eval_service import EvaluationService
from .models import PipelineConfig

logger = logging.getLogger(__name__)


class ObjectCounterService(BaseCounterService):
    """
    Unified service that provides all functionality.
    Per-call pipeline settings build a fresh configuration from the shared defaults.
    """

    def __init__(self, config: Optional[PipelineConfig] = None):
        """Initialize all domain services with the same configuration."""
        super().__init__(config)
        self.count_service = CountService(self.config)
        self.eval_service = EvaluationService(self.config)

    def _with(self, overrides: Dict[str, Any]) -> PipelineConfig:
        """Apply flat overrides (sigma, otsu_classes, r_min, ...) to the shared config."""
        hough_keys = {"r_min", "r_max", "theta_step", "vote_fraction", "min_center_dist",
                      "radius_mode"}
        top = {k: v for k, v in overrides.items() if k not in hough_keys and v is not None}
        hough = {k: v for k, v in overrides.items() if k in hough_keys and v is not None}
        data = self.config.model_dump()
        data.update(top)
        data["hough"].update(hough)
        return PipelineConfig.model_validate(data)

    # Counting - async wrappers
    async def count_file(self, path: str, annotate_dir: str = "", dump_dir: str = "",
                         **overrides) -> Dict[str, Any]:
        """Count objects in one image file."""
        service = CountService(self._with(overrides))
        report = service.count_file(path, annotate_dir or None, dump_dir or None)
        return report.model_dump()

    # Corpora - async wrappers
    async def generate_corpus(self, profile: str, n: int, seed: int, out_dir: str) -> Dict[str, Any]:
        """Write a synthetic corpus."""
        ids = self.eval_service.generate(profile, n, seed, out_dir)
        return {"out_dir": out_dir, "ids": ids}

    async def generate_packet(self, kind: str, noise_sigma: float, seed: int,
                              out_dir: str) -> Dict[str, Any]:
        """Write one packet scene."""
        item_id = self.eval_service.generate_packet(kind, noise_sigma, seed, out_dir)
        return {"out_dir": out_dir, "id": item_id}

    # Evaluation - async wrappers
    async def evaluate_corpus(self, corpus_dir: str, **overrides) -> Dict[str, Any]:
        """Evaluate the pipeline on a corpus directory."""
        service = EvaluationService(self._with(overrides))
        return service.evaluate(corpus_dir).model_dump()

    def get_defaults(self) -> Dict[str, Any]:
        """Current pipeline defaults."""
        return self.config.model_dump()
