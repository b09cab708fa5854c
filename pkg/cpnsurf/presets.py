"""Built-in solution presets stored as JSON files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import structlog

from .errors import ConfigError
from .settings import DEFAULT_PRESET_DIR

logger = structlog.get_logger()


class PresetConfig:
    """A named solution with its default grid, base point and parameters."""

    def __init__(self, config_data: dict[str, Any]):
        """Initialize a preset from JSON data.

        Args:
            config_data: Dictionary with ``settings`` and optional ``tags``
        """
        self.settings = config_data.get("settings", {})
        self.tags = config_data.get("tags", {})

    @property
    def title(self) -> str:
        return self.settings.get("title", "Untitled preset")

    @property
    def description(self) -> str:
        return self.settings.get("description", "")

    @property
    def model(self) -> dict[str, Any]:
        """Solution schema (``n``, ``kind``, components/generators/fields)."""
        return self.settings.get("model", {})

    @property
    def params(self) -> dict[str, Any]:
        """Default values of symbolic parameters used in the model."""
        return self.settings.get("params", {})

    @property
    def grid(self) -> dict[str, Any]:
        return self.settings.get("grid", {})

    @property
    def base_point(self) -> list[float] | None:
        return self.settings.get("base_point")

    @property
    def options(self) -> dict[str, Any]:
        return self.settings.get("options", {})

    @property
    def tolerances(self) -> dict[str, Any]:
        return self.settings.get("tolerances", {})

    @property
    def reference(self) -> str:
        return self.tags.get("reference", "")

    def to_job_dict(self) -> dict[str, Any]:
        """Job-file sections provided by this preset."""
        job: dict[str, Any] = {
            "model": self.model,
            "params": dict(self.params),
            "grid": dict(self.grid),
            "options": dict(self.options),
            "tolerances": dict(self.tolerances),
        }
        if self.base_point is not None:
            job["base_point"] = self.base_point
        return job

    def to_dict(self) -> dict[str, Any]:
        return {"settings": self.settings, "tags": self.tags}


class PresetManager:
    """Loads presets from a directory of ``<name>.json`` files."""

    def __init__(self, config_dir: Path | None = None):
        """Initialize preset manager.

        Args:
            config_dir: Directory containing preset files
        """
        self.config_dir = config_dir or DEFAULT_PRESET_DIR
        self._presets_cache: dict[str, PresetConfig] = {}

    def load_preset(self, name: str) -> PresetConfig | None:
        """Load a preset by name.

        Returns:
            PresetConfig instance or None if not found or unreadable
        """
        if name in self._presets_cache:
            return self._presets_cache[name]

        config_path = self.config_dir / f"{name}.json"
        if not config_path.exists():
            logger.warning("Preset not found", preset=name, path=str(config_path))
            return None

        try:
            with open(config_path, encoding="utf-8") as f:
                config_data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(
                "Failed to load preset", preset=name, path=str(config_path), error=str(e)
            )
            return None

        preset = PresetConfig(config_data)
        self._presets_cache[name] = preset
        logger.debug("Loaded preset", preset=name, title=preset.title)
        return preset

    def require_preset(self, name: str) -> PresetConfig:
        """Like :meth:`load_preset` but raising for unknown names.

        Raises:
            ConfigError: If the preset does not exist or cannot be read
        """
        preset = self.load_preset(name)
        if preset is None:
            raise ConfigError("Unknown preset", preset=name, known=self.list_presets())
        return preset

    def list_presets(self) -> list[str]:
        """Sorted names of all available presets."""
        if not self.config_dir.exists():
            return []
        return sorted(p.stem for p in self.config_dir.glob("*.json"))

    def save_preset(self, name: str, preset: PresetConfig) -> bool:
        """Write a preset back to disk.

        Returns:
            True if saved successfully, False otherwise
        """
        config_path = self.config_dir / f"{name}.json"
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(config_path, "w", encoding="utf-8") as f:
                json.dump(preset.to_dict(), f, indent=2, ensure_ascii=False)
                f.write("\n")
        except OSError as e:
            logger.error("Failed to save preset", preset=name, path=str(config_path), error=str(e))
            return False

        self._presets_cache.pop(name, None)
        logger.info("Saved preset", preset=name, path=str(config_path))
        return True
