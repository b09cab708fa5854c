"""Tests for preset loading."""

import json
import tempfile
from pathlib import Path

import numpy as np
import pytest

from cpnsurf.errors import ConfigError
from cpnsurf.jobs import solution_from_spec
from cpnsurf.model import conservation_residual, el_residual, sample_safe_points
from cpnsurf.presets import PresetConfig, PresetManager

SHIPPED = [
    "cp1-k2",
    "cp1-k3",
    "cp1-perturbed",
    "cp1-sphere",
    "ex1",
    "ex1-a0",
    "ex1-veronese",
    "ex2",
    "ex3",
]


class TestPresetConfig:
    """Test PresetConfig accessors."""

    def test_accessors(self):
        """Test settings and tags are exposed."""
        preset = PresetConfig(
            {
                "settings": {
                    "title": "Sphere",
                    "model": {"n": 1, "components": [[1], [0, 1]]},
                    "grid": {"chart": "disk"},
                    "base_point": [0, 0],
                },
                "tags": {"reference": "sphere"},
            }
        )

        assert preset.title == "Sphere"
        assert preset.model["n"] == 1
        assert preset.reference == "sphere"
        assert preset.params == {}
        job = preset.to_job_dict()
        assert job["base_point"] == [0, 0]
        assert job["grid"] == {"chart": "disk"}

    def test_defaults(self):
        """Test an empty preset."""
        preset = PresetConfig({})
        assert preset.title == "Untitled preset"
        assert "base_point" not in preset.to_job_dict()


class TestPresetManager:
    """Test PresetManager functionality."""

    def setup_method(self):
        """Set up test environment."""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.config_dir = Path(self.temp_dir.name)

    def teardown_method(self):
        """Clean up test environment."""
        self.temp_dir.cleanup()

    def test_save_and_load(self):
        """Test a saved preset loads back."""
        manager = PresetManager(self.config_dir)
        preset = PresetConfig({"settings": {"title": "Line", "model": {"n": 1}}})

        assert manager.save_preset("line", preset)
        assert manager.list_presets() == ["line"]
        assert manager.load_preset("line").title == "Line"

    def test_missing_preset(self):
        """Test missing presets give None or ConfigError."""
        manager = PresetManager(self.config_dir)
        assert manager.load_preset("nothing") is None
        with pytest.raises(ConfigError):
            manager.require_preset("nothing")

    def test_malformed_preset(self):
        """Test a broken JSON file is reported as missing."""
        (self.config_dir / "broken.json").write_text("{not json", encoding="utf-8")
        assert PresetManager(self.config_dir).load_preset("broken") is None

    def test_missing_directory(self):
        """Test listing a missing directory."""
        assert PresetManager(self.config_dir / "absent").list_presets() == []

    def test_cache_invalidated_on_save(self):
        """Test saving replaces a cached preset."""
        manager = PresetManager(self.config_dir)
        manager.save_preset("p", PresetConfig({"settings": {"title": "One"}}))
        assert manager.load_preset("p").title == "One"
        manager.save_preset("p", PresetConfig({"settings": {"title": "Two"}}))
        assert manager.load_preset("p").title == "Two"
        data = json.loads((self.config_dir / "p.json").read_text(encoding="utf-8"))
        assert data["settings"]["title"] == "Two"


class TestShippedPresets:
    """Test the presets in config/presets."""

    def test_all_listed(self):
        """Test every shipped preset is found."""
        assert PresetManager().list_presets() == SHIPPED

    @pytest.mark.parametrize("name", SHIPPED)
    def test_builds(self, name):
        """Test every shipped preset builds its solution."""
        preset = PresetManager().require_preset(name)
        sol = solution_from_spec(preset.model, preset.params, name=name)
        assert sol.n == preset.model["n"]
        assert sol.is_solution != bool(preset.options.get("control", False))

    @pytest.mark.parametrize("name", [n for n in SHIPPED if n != "cp1-perturbed"])
    def test_residuals_at_random_points(self, name):
        """Test EL and conservation residuals stay below 1e-8 at 50 safe points."""
        preset = PresetManager().require_preset(name)
        sol = solution_from_spec(preset.model, preset.params, name=name)
        for pt in sample_safe_points(sol, 50, np.random.default_rng(11)):
            assert el_residual(sol, pt) < 1e-8
            assert conservation_residual(sol, pt) < 1e-8
