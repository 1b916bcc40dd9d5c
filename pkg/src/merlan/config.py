"""Toolkit configuration: extra modality names and plausibility hints.

Loaded from a simple ``key = value`` file, e.g.::

    modalities = temperature, movement
    plausibility.color = image, video
    plausibility.volume = audio

``plausibility.<key>`` overrides the built-in table entry for that
attribute key; an empty value removes the hint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .model import BUILTIN_MODALITIES

#: Attribute keys that only make sense for specific modalities. Deliberately
#: tiny; these drive advisory W003 hints, never errors.
DEFAULT_PLAUSIBILITY: dict[str, frozenset[str]] = {
    "color": frozenset({"image", "video"}),
    "brand": frozenset({"image", "video"}),
    "model": frozenset({"image", "video"}),
    "volume": frozenset({"audio"}),
}


@dataclass(frozen=True)
class Config:
    extra_modalities: frozenset[str] = frozenset()
    plausibility: dict[str, frozenset[str]] = field(
        default_factory=lambda: dict(DEFAULT_PLAUSIBILITY)
    )

    @property
    def known_modalities(self) -> frozenset[str]:
        return frozenset(BUILTIN_MODALITIES) | self.extra_modalities


class ConfigError(Exception):
    pass


def load_config(path: str | Path) -> Config:
    extra: set[str] = set()
    plausibility = dict(DEFAULT_PLAUSIBILITY)
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        values = {v.strip().lower() for v in value.split(",") if v.strip()}
        if key == "modalities":
            extra |= values
        elif key.startswith("plausibility."):
            attr = key[len("plausibility."):].strip()
            if not attr:
                raise ConfigError(f"{path}:{line_no}: missing attribute key")
            if values:
                plausibility[attr] = frozenset(values)
            else:
                plausibility.pop(attr, None)
        else:
            raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
    return Config(frozenset(extra), plausibility)
