"""Named experiment presets: channel cardinalities and depth per experiment."""

from __future__ import annotations

from typing import Any, NamedTuple

from shared.exceptions import ConfigError

PATCH_SIZE = 160
DEFAULT_STEPS = 2000


class Preset(NamedTuple):
    """Global, local and periodic channel counts plus network depth."""

    d_g: int
    d_l: int
    d_p: int
    depth: int


PRESETS: dict[str, Preset] = {
    "text-p6": Preset(d_g=0, d_l=10, d_p=2, depth=4),
    "single-honeycomb": Preset(d_g=0, d_l=10, d_p=2, depth=5),
    "merrigum": Preset(d_g=10, d_l=30, d_p=2, depth=5),
    "dtd": Preset(d_g=40, d_l=20, d_p=4, depth=5),
    "facades": Preset(d_g=40, d_l=20, d_p=6, depth=5),
    "sydney": Preset(d_g=30, d_l=20, d_p=4, depth=5),
}


def get_preset(name: str) -> Preset:
    """Return preset by name."""
    try:
        return PRESETS[name.lower()]
    except KeyError as exc:
        raise ConfigError(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}", field="preset"
        ) from exc


def preset_document(name: str) -> dict[str, Any]:
    """Run-config document of a preset at 160 x 160 patches and desk-scale step count."""
    preset = get_preset(name)
    extent = PATCH_SIZE // 2**preset.depth
    return {
        "run_name": name.lower(),
        "noise": {
            "d_l": preset.d_l,
            "d_g": preset.d_g,
            "d_p": preset.d_p,
            "L": extent,
            "M": extent,
        },
        "net": {
            "depth": preset.depth,
            "noise_channels": preset.d_l + preset.d_g + preset.d_p,
        },
        "train": {"patch_size": PATCH_SIZE, "steps": DEFAULT_STEPS},
        "data": {"kind": "single_image", "path": ""},
    }
