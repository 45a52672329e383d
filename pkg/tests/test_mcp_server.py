"""
MCP tool and resource handlers, awaited directly without a transport.
"""
import asyncio
import json

import pytest

import mcp_server
from src.unified_service import ObjectCounterService


@pytest.fixture(autouse=True)
def counter_service(monkeypatch):
    service = ObjectCounterService()
    monkeypatch.setattr(mcp_server, "service", service)
    return service


@pytest.fixture
def caps_dir(tmp_path):
    out = tmp_path / "scenes"
    reply = asyncio.run(mcp_server.generate_packet("caps", str(out)))
    assert reply == f"✅ Wrote caps_packet to {out}"
    return out


class TestCountObjects:
    def test_caps_packet(self, caps_dir):
        reply = asyncio.run(mcp_server.count_objects(str(caps_dir / "caps_packet.ppm")))
        assert reply.startswith(f"🔵 **{caps_dir / 'caps_packet.ppm'}**: 4 objects")
        assert "• Thresholds:" in reply and "• Edge pixels:" in reply
        assert reply.count("  - center (") == 4
        assert "⏱️ Pipeline time:" in reply

    def test_annotated_copy(self, caps_dir, tmp_path):
        out = tmp_path / "annotated"
        reply = asyncio.run(mcp_server.count_objects(str(caps_dir / "caps_packet.ppm"),
                                                     annotate_dir=str(out)))
        assert f"🖍️ Annotated frame written to {out}" in reply
        assert (out / "caps_packet.annotated.ppm").is_file()

    def test_dense_edges_are_flagged(self, caps_dir, counter_service):
        counter_service.config = counter_service.config.model_copy(update={"max_edge_density": 1e-6})
        reply = asyncio.run(mcp_server.count_objects(str(caps_dir / "caps_packet.ppm")))
        assert ": 0 objects" in reply
        assert "⚠️ Edge map too dense to count" in reply

    def test_gray_frame_is_degenerate(self, tmp_path):
        path = tmp_path / "blank.pgm"
        path.write_bytes(b"P5\n16 16\n255\n" + bytes(256))
        reply = asyncio.run(mcp_server.count_objects(str(path)))
        assert reply.startswith("⚪ ")
        assert "0 objects" in reply

    def test_missing_file(self, tmp_path):
        path = tmp_path / "nope.ppm"
        reply = asyncio.run(mcp_server.count_objects(str(path)))
        assert reply.startswith(f"❌ Error counting objects in {path}:")

    def test_invalid_parameters(self, caps_dir):
        reply = asyncio.run(mcp_server.count_objects(str(caps_dir / "caps_packet.ppm"),
                                                     r_min=40, r_max=20))
        assert reply.startswith("❌ Error counting objects in")


class TestGenerate:
    def test_corpus(self, tmp_path):
        out = tmp_path / "clean"
        reply = asyncio.run(mcp_server.generate_corpus("clean", str(out), n=2, seed=1))
        assert reply.startswith(f"✅ Wrote 2 clean images to {out} (")
        assert len(list(out.glob("*.ppm"))) == 2
        assert len(list(out.glob("*.truth"))) == 2

    def test_unknown_profile(self, tmp_path):
        reply = asyncio.run(mcp_server.generate_corpus("glossy", str(tmp_path)))
        assert reply.startswith("❌ Error generating glossy corpus:")

    def test_unknown_packet(self, tmp_path):
        reply = asyncio.run(mcp_server.generate_packet("coins", str(tmp_path)))
        assert reply.startswith("❌ Error generating coins packet:")


class TestEvaluateCorpus:
    def test_packet_corpus(self, caps_dir):
        reply = asyncio.run(mcp_server.evaluate_corpus(str(caps_dir)))
        assert reply.startswith(f"📊 **Evaluation of {caps_dir}** (1 images)")
        assert "• Exact-count accuracy: 100.0%" in reply
        assert "• Recall: 100.0%" in reply
        assert "• Precision: 100.0%" in reply
        assert "miscounted" not in reply

    def test_empty_directory(self, tmp_path):
        reply = asyncio.run(mcp_server.evaluate_corpus(str(tmp_path)))
        assert reply.startswith(f"❌ Error evaluating corpus {tmp_path}:")


class TestConfigDefaults:
    def test_defaults_resource(self):
        defaults = json.loads(asyncio.run(mcp_server.config_defaults()))
        assert defaults["sigma"] == 1.4
        assert defaults["otsu_classes"] == 4
        assert defaults["max_edge_density"] == 0.2
        assert defaults["hough"]["r_min"] == 10
        assert defaults["hough"]["r_max"] == 60
