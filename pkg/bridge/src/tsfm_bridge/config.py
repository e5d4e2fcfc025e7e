"""Bridge configuration: model family, size variant, device, API key."""

from __future__ import annotations

import os
from dataclasses import dataclass

#: Size tags published for each family; the echo conformance forecaster
#: has no variants.
FAMILY_VARIANTS = {
    "chronos-bolt": ("tiny", "mini", "small", "base"),
    "chronos-t5": ("tiny", "mini", "small", "base", "large"),
    "moirai": ("small", "base", "large"),
    "timesfm": ("200m", "500m"),
    "time-moe": ("50m", "200m"),
    "timegpt": ("timegpt-1",),
    "echo": (),
}

INPUT_SIZE = 168
HORIZON = 24


class BridgeConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BridgeConfig:
    model_family: str
    variant: str = ""
    device: str = "cpu"
    api_key: str | None = None
    seed: int = 0
    num_samples: int = 20

    def __post_init__(self):
        if self.model_family not in FAMILY_VARIANTS:
            raise BridgeConfigError(
                f"unknown model family {self.model_family!r}; "
                f"known: {', '.join(sorted(FAMILY_VARIANTS))}"
            )
        variants = FAMILY_VARIANTS[self.model_family]
        if variants and self.variant not in variants:
            raise BridgeConfigError(
                f"variant {self.variant!r} invalid for {self.model_family}; "
                f"choose one of {', '.join(variants)}"
            )
        if not variants and self.variant:
            raise BridgeConfigError(
                f"{self.model_family} takes no variant, got {self.variant!r}"
            )
        if self.model_family == "timegpt" and not self.api_key:
            raise BridgeConfigError(
                "timegpt needs an API key (--api-key or NIXTLA_API_KEY)"
            )

    @property
    def name(self) -> str:
        return (f"{self.model_family}-{self.variant}"
                if self.variant else self.model_family)


def cache_dir() -> str | None:
    """Weight cache root; exported to the model libraries when set."""
    return os.environ.get("TSFM_BRIDGE_CACHE")
