"""Unit tests for autocorrelation heat maps."""

from PIL import Image

from data_ingest.synth import synth_texture
from evalkit.autocorr import autocorrelation, detect_periodicity_peaks
from evalkit.heatmap import render_autocorr_heatmap


def test_heatmap_written(tmp_path):
    """Test the heat map is a PNG even with missing period vectors."""
    acmap = autocorrelation(synth_texture("stripes", 64, period=8))
    path = render_autocorr_heatmap(
        acmap,
        [(8.0, 0.0), None],
        tmp_path / "maps" / "autocorr.png",
        peaks=detect_periodicity_peaks(acmap),
        title="stripes",
    )
    with Image.open(path) as handle:
        assert handle.format == "PNG"
        assert handle.size == (600, 600)
