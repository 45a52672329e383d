"""
Corpus persistence service: PPM images plus plain-text truth sidecars.
"""
import logging
from pathlib import Path
from typing import List, Tuple, Union

from .base_service import BaseCounterService
from .errors import CorpusNotFound, TruthFormatError
from .imagebuf import PnmImage
from .models import GroundTruth
from .synth import Profile, PacketKind, corpus, packet_spec, render

logger = logging.getLogger(__name__)

TRUTH_SUFFIX = ".truth"
IMAGE_SUFFIX = ".ppm"


def format_truth(truth: GroundTruth) -> str:
    """One 'cx cy r' line per circle."""
    return "".join(f"{cx} {cy} {r}\n" for cx, cy, r in truth.circles)


def parse_truth(text: str, source: str = "<truth>") -> GroundTruth:
    """Parse "cx cy r" lines into a GroundTruth; blank lines are skipped."""
    circles = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 3:
            raise TruthFormatError(f"{source}:{lineno}: expected 'cx cy r', got {line!r}")
        try:
            cx, cy, r = (int(f) for f in fields)
        except ValueError:
            raise TruthFormatError(f"{source}:{lineno}: non-integer field in {line!r}")
        if r < 1:
            raise TruthFormatError(f"{source}:{lineno}: radius must be positive")
        circles.append((cx, cy, r))
    return GroundTruth(circles=circles)


class CorpusService(BaseCounterService):
    """Service for writing and reading synthetic corpora."""

    def _write_item(self, out_dir: Path, item_id: str, image: PnmImage, truth: GroundTruth) -> None:
        self.save_image(out_dir / f"{item_id}{IMAGE_SUFFIX}", image)
        (out_dir / f"{item_id}{TRUTH_SUFFIX}").write_text(format_truth(truth), encoding="ascii")

    def generate(self, profile: Profile, n: int, seed: int,
                 out_dir: Union[str, Path]) -> List[str]:
        """Render a corpus and write it as PPM + truth pairs."""
        try:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            ids = []
            for i, (image, truth) in enumerate(corpus(profile, n, seed)):
                item_id = f"{profile}_{i:04d}"
                self._write_item(out_dir, item_id, image, truth)
                ids.append(item_id)
            logger.info(f"Wrote {len(ids)} {profile} images to {out_dir}")
            return ids
        except Exception as e:
            logger.error(f"Failed to generate {profile} corpus in {out_dir}: {e}")
            raise

    def generate_packet(self, kind: PacketKind, noise_sigma: float, seed: int,
                        out_dir: Union[str, Path]) -> str:
        """Render one egg packet or bottle-cap pack."""
        try:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            image, truth = render(packet_spec(kind, noise_sigma=noise_sigma, rng_seed=seed))
            item_id = f"{kind}_packet"
            self._write_item(out_dir, item_id, image, truth)
            return item_id
        except Exception as e:
            logger.error(f"Failed to generate {kind} packet in {out_dir}: {e}")
            raise

    def load(self, corpus_dir: Union[str, Path]) -> List[Tuple[str, PnmImage, GroundTruth]]:
        """Read every image/truth pair, sorted by id."""
        corpus_dir = Path(corpus_dir)
        images = sorted(corpus_dir.glob(f"*{IMAGE_SUFFIX}")) if corpus_dir.is_dir() else []
        if not images:
            raise CorpusNotFound(f"no corpus found in {corpus_dir}")

        items = []
        for image_path in images:
            truth_path = image_path.with_suffix(TRUTH_SUFFIX)
            if not truth_path.is_file():
                raise TruthFormatError(f"missing truth sidecar {truth_path}")
            truth = parse_truth(truth_path.read_text(encoding="ascii"), str(truth_path))
            items.append((image_path.stem, self.load_image(image_path), truth))
        logger.info(f"Loaded {len(items)} corpus images from {corpus_dir}")
        return items
