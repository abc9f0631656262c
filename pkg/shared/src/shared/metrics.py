"""Prometheus metrics utilities."""

from pathlib import Path

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Gauge,
    Histogram,
    generate_latest,
    write_to_textfile,
)

REGISTRY = CollectorRegistry(auto_describe=True)

# Training metrics
train_steps_total = Counter(
    "train_steps_total",
    "Total number of completed training steps",
    registry=REGISTRY,
)

train_loss = Gauge(
    "train_loss",
    "Most recent adversarial loss",
    ["network"],
    registry=REGISTRY,
)

discriminator_output_mean = Gauge(
    "discriminator_output_mean",
    "Mean discriminator probability on the last minibatch",
    ["source"],
    registry=REGISTRY,
)

checkpoints_written_total = Counter(
    "checkpoints_written_total",
    "Total number of checkpoints written",
    registry=REGISTRY,
)

# Rendering metrics
render_duration_seconds = Histogram(
    "render_duration_seconds",
    "Render duration in seconds",
    ["operation"],
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0),
    registry=REGISTRY,
)

rendered_pixels_total = Counter(
    "rendered_pixels_total",
    "Total number of rendered output pixels",
    ["operation"],
    registry=REGISTRY,
)

# Error metrics
errors_total = Counter(
    "errors_total",
    "Total number of errors",
    ["error_type"],
    registry=REGISTRY,
)


def get_metrics() -> bytes:
    """Get Prometheus metrics in text format."""
    return generate_latest(REGISTRY)


def write_metrics(path: str | Path) -> None:
    """Write the registry to a node-exporter style text file."""
    write_to_textfile(str(path), REGISTRY)
