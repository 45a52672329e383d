#!/usr/bin/env python3
"""
Object Counter MCP Server - SSE Transport Only
Counts circular objects in PNM frames and manages synthetic evaluation corpora over Server-Sent Events
"""

import os
import json
import logging
from typing import Optional
from dotenv import load_dotenv
from mcp.server.fastmcp import FastMCP

# Load environment variables
load_dotenv()

from src.config import get_default_workers, get_log_level
from src.models import PipelineConfig
from src.unified_service import ObjectCounterService

# Configure logging
logging.basicConfig(level=get_log_level("INFO"), format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# Create MCP server
mcp = FastMCP("Object Counter MCP Server")

service = None
_service_initialization_lock = None

async def get_service():
    """Get the service (with fallback lazy initialization if pre-init failed)."""
    global service, _service_initialization_lock

    if service is None:
        import asyncio
        if _service_initialization_lock is None:
            _service_initialization_lock = asyncio.Lock()

        async with _service_initialization_lock:
            if service is None:
                logger.warning("⚠️ Service not pre-initialized, initializing now...")
                await init_service()

    return service

async def init_service():
    """Initialize the counter service with environment defaults."""
    global service

    try:
        service = ObjectCounterService(PipelineConfig(workers=get_default_workers()))
        logger.info(f"✅ Counter service ready (workers={service.config.workers})")
    except Exception as e:
        logger.error(f"❌ Failed to initialize counter service: {e}")
        raise

@mcp.tool()
async def count_objects(path: str, sigma: Optional[float] = None, otsu_classes: Optional[int] = None,
                        r_min: Optional[int] = None, r_max: Optional[int] = None,
                        vote_fraction: Optional[float] = None, annotate_dir: str = "",
                        dump_dir: str = "") -> str:
    """Count circular objects in a PPM/PGM image on the server filesystem"""
    try:
        result = await (await get_service()).count_file(
            path, annotate_dir=annotate_dir, dump_dir=dump_dir, sigma=sigma,
            otsu_classes=otsu_classes, r_min=r_min, r_max=r_max, vote_fraction=vote_fraction,
        )

        if result['degenerate']:
            return f"⚪ **{path}**: 0 objects (flat saturation histogram, nothing to segment)"

        output = f"🔵 **{path}**: {result['count']} objects\n\n"
        output += f"• Thresholds: {', '.join(str(t) for t in result['thresholds'])}\n"
        output += f"• Edge pixels: {result['edge_count']}\n"
        if result['edge_guard'] == 'two_class':
            output += "• Four-class edges were background speckle, counted with two classes\n"
        elif result['edge_guard'] == 'rejected':
            output += "• ⚠️ Edge map too dense to count, reported as empty\n"
        output += "\n"
        for c in result['circles']:
            output += f"  - center ({c['cx']}, {c['cy']}) r={c['radius']} score={c['score']:.3f}\n"
        total = sum(result['stage_timings'].values())
        output += f"\n⏱️ Pipeline time: {total * 1000:.1f} ms"
        if annotate_dir:
            output += f"\n🖍️ Annotated frame written to {annotate_dir}"
        return output
    except Exception as e:
        logger.error(f"Error counting objects in {path}: {e}")
        return f"❌ Error counting objects in {path}: {str(e)}"

@mcp.tool()
async def generate_corpus(profile: str, out_dir: str, n: int = 10, seed: int = 0) -> str:
    """Generate a synthetic corpus (clean, noisy or occluded) with ground-truth sidecars"""
    try:
        result = await (await get_service()).generate_corpus(profile, n, seed, out_dir)
        ids = result['ids']
        return f"✅ Wrote {len(ids)} {profile} images to {out_dir} ({ids[0]} .. {ids[-1]})"
    except Exception as e:
        logger.error(f"Error generating {profile} corpus: {e}")
        return f"❌ Error generating {profile} corpus: {str(e)}"

@mcp.tool()
async def generate_packet(kind: str, out_dir: str, noise_sigma: float = 0.0, seed: int = 0) -> str:
    """Render an egg packet (6 eggs) or bottle-cap pack (4 caps) scene"""
    try:
        result = await (await get_service()).generate_packet(kind, noise_sigma, seed, out_dir)
        return f"✅ Wrote {result['id']} to {out_dir}"
    except Exception as e:
        logger.error(f"Error generating {kind} packet: {e}")
        return f"❌ Error generating {kind} packet: {str(e)}"

@mcp.tool()
async def evaluate_corpus(corpus_dir: str, sigma: Optional[float] = None,
                          otsu_classes: Optional[int] = None,
                          vote_fraction: Optional[float] = None) -> str:
    """Run the counter over a corpus directory and report accuracy, recall and precision"""
    try:
        result = await (await get_service()).evaluate_corpus(
            corpus_dir, sigma=sigma, otsu_classes=otsu_classes, vote_fraction=vote_fraction,
        )
        images = result['images']
        misses = [r for r in images if r['truth_count'] != r['detected_count']]

        output = f"📊 **Evaluation of {corpus_dir}** ({len(images)} images)\n\n"
        output += f"• Exact-count accuracy: {result['exact_count_accuracy'] * 100:.1f}%\n"
        output += f"• Recall: {result['recall'] * 100:.1f}%\n"
        output += f"• Precision: {result['precision'] * 100:.1f}%\n"
        if misses:
            output += f"\n⚠️ {len(misses)} images miscounted:\n"
            for r in misses:
                output += f"  - {r['image_id']}: truth {r['truth_count']}, detected {r['detected_count']}\n"
        return output
    except Exception as e:
        logger.error(f"Error evaluating corpus {corpus_dir}: {e}")
        return f"❌ Error evaluating corpus {corpus_dir}: {str(e)}"

@mcp.resource("counter://config/defaults")
async def config_defaults() -> str:
    """Get the default pipeline configuration"""
    try:
        return json.dumps((await get_service()).get_defaults(), indent=2)
    except Exception as e:
        logger.error(f"Error getting defaults: {e}")
        return f"Error getting defaults: {str(e)}"

if __name__ == "__main__":
    import sys
    import asyncio

    mount_path = None

    i = 1
    while i < len(sys.argv):
        if sys.argv[i] == "--mount-path" and i + 1 < len(sys.argv):
            mount_path = sys.argv[i + 1]
            i += 2
        elif sys.argv[i] in ["--help", "-h"]:
            from src.config import DEFAULT_MCP_PORT, DEFAULT_MCP_HOST
            print("Object Counter MCP Server - SSE Transport")
            print("Usage: python mcp_server.py [--mount-path PATH]")
            print()
            print("Options:")
            print("  --mount-path PATH  SSE mount path (optional)")
            print("  --help, -h         Show this help message")
            print()
            print("Environment variables optional:")
            print(f"  MCP_PORT           Server port (default: {DEFAULT_MCP_PORT})")
            print(f"  MCP_HOST           Server host (default: {DEFAULT_MCP_HOST})")
            print("  OBJCOUNT_WORKERS   Radius-slice worker threads (default: 1)")
            print("  OBJCOUNT_LOG_LEVEL Log level (default: INFO)")
            sys.exit(0)
        else:
            print(f"Unknown argument: {sys.argv[i]}")
            sys.exit(1)

    from src.config import DEFAULT_MCP_PORT, DEFAULT_MCP_HOST
    port = int(os.getenv("MCP_PORT", str(DEFAULT_MCP_PORT)))
    host = os.getenv("MCP_HOST", DEFAULT_MCP_HOST)
    mcp.settings.host = host
    mcp.settings.port = port

    logger.info(f"🚀 Starting Object Counter MCP Server on {host}:{port}")
    logger.info("💡 Set MCP_PORT and MCP_HOST environment variables to customize")

    logger.info("🔄 Initializing counter service...")
    try:
        asyncio.run(init_service())
        logger.info("✅ Service pre-initialized successfully")
    except Exception as e:
        logger.error(f"❌ Service initialization failed: {e}")
        logger.error("The server will start but tools may not work until service initializes")

    # Run the SSE server
    mcp.run(transport="sse", mount_path=mount_path)
