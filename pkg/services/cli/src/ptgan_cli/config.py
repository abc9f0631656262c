"""Run configuration documents: loading, overrides and validation."""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from ptgan_cli.presets import preset_document
from shared.exceptions import ArtifactIOError, ConfigError, NotFoundError
from shared.models.run import RunConfig

CONFIG_SNAPSHOT = "config.json"

# recomputed after overrides unless set explicitly
DERIVED_FIELDS = ("net.noise_channels", "train.patch_size")


def parse_override(text: str) -> tuple[list[str], Any]:
    """``"train.steps=100"`` -> (["train", "steps"], 100); values are JSON, else strings."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override {text!r} is not key.path=value", field="override")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_overrides(document: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    """Return a copy of ``document`` with every ``key.path=value`` applied."""
    result = copy.deepcopy(document)
    for text in overrides:
        path, value = parse_override(text)
        node = result
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"{'.'.join(path)}: {part} is not a section", field="override")
            node = child
        node[path[-1]] = value
    return result


def _fill_derived(document: dict[str, Any], explicit: set[str]) -> None:
    noise = document.get("noise", {})
    net = document.setdefault("net", {})
    train = document.setdefault("train", {})
    if "net.noise_channels" not in explicit:
        net["noise_channels"] = (
            noise.get("d_l", 10) + noise.get("d_g", 0) + noise.get("d_p", 2)
        )
    if "train.patch_size" not in explicit:
        train["patch_size"] = 2 ** net.get("depth", 5) * noise.get("L", 5)


def read_document(path: str | Path) -> dict[str, Any]:
    """Parse a JSON run-config or plan file."""
    path = Path(path)
    if not path.is_file():
        raise NotFoundError("Config file", str(path))
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactIOError(f"cannot parse {path}: {exc}") from exc


def validation_error(exc: PydanticValidationError, prefix: str = "") -> ConfigError:
    """First pydantic error as a ConfigError carrying the field path."""
    first = exc.errors()[0]
    field = ".".join(str(part) for part in first.get("loc", ()))
    if prefix:
        field = f"{prefix}.{field}" if field else prefix
    return ConfigError(first.get("msg", str(exc)), field=field or None)


def build_run_config(
    *,
    config_path: Optional[str | Path] = None,
    preset: Optional[str] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
    data_path: Optional[str] = None,
    output_dir: Optional[str] = None,
) -> RunConfig:
    """
    Build and validate a run config from a preset or a JSON file plus overrides.

    Raises:
        ConfigError: neither or both sources given, or the document is invalid
    """
    if (config_path is None) == (preset is None):
        raise ConfigError("give exactly one of --config or --preset", field="config")
    document = preset_document(preset) if preset else read_document(config_path)

    explicit_overrides = list(overrides)
    if seed is not None:
        explicit_overrides.append(f"train.seed={seed}")
    if data_path is not None:
        explicit_overrides.append(f"data.path={json.dumps(data_path)}")
    if output_dir is not None:
        explicit_overrides.append(f"output_dir={json.dumps(output_dir)}")
    document = apply_overrides(document, explicit_overrides)
    explicit = {".".join(parse_override(text)[0]) for text in overrides}
    if preset is not None:
        _fill_derived(document, explicit)

    if not document.get("data", {}).get("path"):
        raise ConfigError("no training data; pass --data or set data.path", field="data.path")
    try:
        return RunConfig.model_validate(document)
    except PydanticValidationError as exc:
        raise validation_error(exc) from exc


def write_config_snapshot(config: RunConfig, run_dir: str | Path) -> Path:
    """Write ``config.json`` (pretty, sorted keys) into the run directory."""
    path = Path(run_dir) / CONFIG_SNAPSHOT
    document = json.loads(config.model_dump_json())
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path


def read_config_snapshot(run_dir: str | Path) -> RunConfig:
    """Load the config snapshot of an existing run directory."""
    document = read_document(Path(run_dir) / CONFIG_SNAPSHOT)
    try:
        return RunConfig.model_validate(document)
    except PydanticValidationError as exc:
        raise validation_error(exc) from exc
