"""Deterministic seed derivation for independent random streams."""

import hashlib

import torch


def derive_seed(seed: int, *parts: object) -> int:
    """Return a 63-bit seed derived from a master seed and a path of labels."""
    text = ":".join([str(int(seed)), *(str(part) for part in parts)])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") & ((1 << 63) - 1)


def make_generator(
    seed: int, *parts: object, device: torch.device | str = "cpu"
) -> torch.Generator:
    """Create a torch.Generator seeded from ``derive_seed(seed, *parts)``."""
    generator = torch.Generator(device=device)
    generator.manual_seed(derive_seed(seed, *parts))
    return generator
