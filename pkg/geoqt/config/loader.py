# SPDX-License-Identifier: BUSL-1.1
"""YAML run-config discovery, loading, and saving."""

from pathlib import Path
from typing import Optional

import yaml

from geoqt.config.resources import ResourceError, RunConfig, resource_from_dict, resource_to_dict
from geoqt.config.validation import ConfigError
from geoqt.utils import atomic_write_text

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets" / "configs"


class ConfigStore:
    """Resolves --config references to RunConfig objects.

    A reference is a path to a YAML/JSON file or the name of a shipped
    preset (presets/configs/<name>.yaml).
    """

    def __init__(self, preset_dir: Optional[Path] = None):
        self.preset_dir = preset_dir or PRESET_DIR

    # ── Presets ───────────────────────────────────────────────────────

    def list_presets(self) -> list:
        if not self.preset_dir.is_dir():
            return []
        return sorted(p.stem for p in self.preset_dir.glob("*.yaml"))

    def preset_path(self, name: str) -> Path:
        return self.preset_dir / f"{name}.yaml"

    def resolve(self, ref: str) -> Path:
        path = Path(ref).expanduser()
        if path.is_file():
            return path
        preset = self.preset_path(ref)
        if "/" not in ref and preset.is_file():
            return preset
        presets = ", ".join(self.list_presets()) or "none"
        raise ConfigError([f"config {ref!r} is neither a file nor a preset (presets: {presets})"])

    # ── Loading ──────────────────────────────────────────────────────

    def parse(self, text: str, source: str = "<string>") -> RunConfig:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError([f"{source}: invalid YAML: {exc}"]) from None
        try:
            return resource_from_dict(data)
        except ResourceError as exc:
            raise ConfigError([f"{source}: {exc}"]) from None

    def load(self, ref: Optional[str]) -> RunConfig:
        """Load by path or preset name; None gives the all-defaults config."""
        if ref is None:
            return RunConfig()
        path = self.resolve(ref)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from None
        return self.parse(text, str(path))

    # ── Saving ───────────────────────────────────────────────────────

    def dump(self, config: RunConfig) -> str:
        return yaml.dump(resource_to_dict(config), default_flow_style=False, sort_keys=False)

    def save(self, config: RunConfig, path) -> Path:
        return atomic_write_text(path, self.dump(config))
