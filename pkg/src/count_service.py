"""
Object counting service.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from .base_service import BaseCounterService
from .imagebuf import GrayImage
from .models import CountReport
from .pipeline import annotate, run

logger = logging.getLogger(__name__)

CountResult = Tuple[str, Union[CountReport, Exception]]


class CountService(BaseCounterService):
    """Service for counting objects in image files."""

    def count_file(self, path: Union[str, Path], annotate_dir: Optional[Union[str, Path]] = None,
                   dump_dir: Optional[Union[str, Path]] = None) -> CountReport:
        """Run the pipeline on one file, optionally writing annotations and stage dumps."""
        path = Path(path)
        source_id = path.stem
        try:
            image = self.load_image(path)
            config = self.config
            if dump_dir is not None and not config.dump_stages:
                config = config.model_copy(update={"dump_stages": True})
            report, dump = run(image, config, source_id=source_id)

            if dump is not None and dump_dir is not None:
                dump.write(dump_dir, source_id)
            if annotate_dir is not None:
                out_dir = Path(annotate_dir)
                out_dir.mkdir(parents=True, exist_ok=True)
                rgb = image.to_rgb() if isinstance(image, GrayImage) else image
                self.save_image(out_dir / f"{source_id}.annotated.ppm", annotate(rgb, report.circles))

            logger.info(f"Counted {report.count} objects in {path}")
            return report
        except Exception as e:
            logger.error(f"Failed to count objects in {path}: {e}")
            raise

    def count_files(self, paths: Sequence[Union[str, Path]], workers: int = 1,
                    annotate_dir: Optional[Union[str, Path]] = None,
                    dump_dir: Optional[Union[str, Path]] = None) -> List[CountResult]:
        """Count every file; results come back in input order, failures as exceptions."""

        def one(path) -> CountResult:
            try:
                return str(path), self.count_file(path, annotate_dir, dump_dir)
            except Exception as e:
                return str(path), e

        if workers > 1 and len(paths) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(one, paths))
        return [one(path) for path in paths]
