"""Tests for job files and the solution schema."""

import json
import tempfile
from pathlib import Path

import pytest

from cpnsurf.errors import ConfigError
from cpnsurf.jobs import JobConfig, parse_point, solution_from_spec, substitute_params
from cpnsurf.model import SolutionKind
from cpnsurf.settings import DEFAULT_TOLERANCES, Tolerances


class TestSubstituteParams:
    """Test parameter substitution."""

    def test_whole_names_only(self):
        """Test only whole identifiers are replaced."""
        assert substitute_params("a*xi + a2", {"a": 2}) == "(2)*xi + a2"

    def test_nested(self):
        """Test lists and dicts are walked; numbers pass through."""
        spec = {"components": [[1], [0, "a"]], "n": 1}
        out = substitute_params(spec, {"a": 0.5})
        assert out == {"components": [[1], [0, "(0.5)"]], "n": 1}

    def test_complex_value(self):
        """Test complex values are rendered with I."""
        assert substitute_params("c", {"c": [1, 2]}) == "(1.0 + (2.0)*I)"

    def test_no_params(self):
        """Test values are returned unchanged without params."""
        spec = {"n": 1}
        assert substitute_params(spec, {}) is spec

    @pytest.mark.parametrize("name", ["xi", "sqrt", "2a", "a-b"])
    def test_bad_names(self, name):
        """Test reserved and malformed names are refused."""
        with pytest.raises(ConfigError):
            substitute_params("x", {name: 1})


class TestSolutionFromSpec:
    """Test the JSON solution schema."""

    def test_inferred_holomorphic(self):
        """Test kind is inferred from components."""
        sol = solution_from_spec({"n": 1, "components": [[1], [0, 1]]})
        assert sol.kind is SolutionKind.HOLOMORPHIC
        assert sol.is_solution

    def test_parameters(self):
        """Test parameters reach the coefficients."""
        spec = {"n": 2, "components": [[1], [0, "a"], [0, 0, 1]]}
        sol = solution_from_spec(spec, {"a": 2})
        assert sol.degrees() == solution_from_spec(spec, {"a": 3}).degrees()

    def test_mixed_and_fields(self):
        """Test generators and field expressions."""
        mixed = solution_from_spec({"n": 2, "generators": [[1], [0, 1], [0, 0, 1]]})
        assert mixed.kind is SolutionKind.MIXED
        fields = solution_from_spec({"n": 1, "fields": ["1", "xib"]})
        assert fields.is_solution

    def test_exclusion_radius(self):
        """Test the tolerance radius is applied to the registry."""
        tol = Tolerances(exclusion_radius=0.25)
        sol = solution_from_spec({"n": 1, "components": [[1], [0, 1]]}, tolerances=tol)
        assert sol.registry.radius == 0.25

    @pytest.mark.parametrize(
        "spec",
        [
            [1, 2],
            {"n": 1, "components": [[1], [0, 1]], "extra": 1},
            {"components": [[1], [0, 1]]},
            {"n": 0, "components": [[1]]},
            {"n": True, "components": [[1], [0, 1]]},
            {"n": 1.0, "components": [[1], [0, 1]]},
            {"n": 1, "kind": "mixed", "generators": [[1], [0, 1], [0, 0, 1]]},
            {"n": 1, "components": [[1]]},
            {"n": 1, "components": []},
            {"n": 1, "fields": ["1", 2]},
            {"n": 1, "kind": "harmonic", "components": [[1], [0, 1]]},
            {"n": 1, "components": [[1], [0, 1]], "fields": ["1", "xi"]},
        ],
    )
    def test_schema_errors(self, spec):
        """Test schema violations raise ConfigError."""
        with pytest.raises(ConfigError):
            solution_from_spec(spec)


class TestParsePoint:
    """Test base point parsing."""

    def test_forms(self):
        """Test pairs, numbers and strings."""
        assert parse_point([2, 0]) == 2
        assert parse_point(1.5) == 1.5
        assert parse_point("1 + 2*I") == 1 + 2j

    def test_not_constant(self):
        """Test expressions in xi are refused."""
        with pytest.raises(ConfigError):
            parse_point("xi")


class TestJobConfig:
    """Test job resolution."""

    def setup_method(self):
        """Set up test environment."""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.job_dir = Path(self.temp_dir.name)

    def teardown_method(self):
        """Clean up test environment."""
        self.temp_dir.cleanup()

    def test_preset_merge(self):
        """Test job sections are merged over the preset."""
        job = JobConfig.from_dict(
            {"preset": "ex1", "params": {"a": 2}, "grid": {"n": 8}, "tolerances": {"conformal": 1e-9}}
        )
        assert job.name == "ex1"
        assert job.params == {"a": 2}
        assert job.grid["n"] == 8
        assert job.grid["chart"] == "polar"
        assert job.tolerances.conformal == 1e-9
        assert job.tolerances.path_quadrature == DEFAULT_TOLERANCES.path_quadrature
        assert job.solution.n == 2

    def test_base_point_from_preset(self):
        """Test the preset base point is parsed."""
        job = JobConfig.from_preset("ex3")
        assert job.base_point == 2
        assert job.immersion().base_point == 2

    @pytest.mark.parametrize(
        "data",
        [
            [],
            {"model": {"n": 1}, "colour": "red"},
            {},
            {"preset": "ex1", "output": "out"},
            {"preset": "ex1", "grid": [1]},
            {"preset": "ex1", "tolerances": {"speed": 1}},
            {"preset": "unknown"},
        ],
    )
    def test_invalid_jobs(self, data):
        """Test invalid job documents raise ConfigError."""
        with pytest.raises(ConfigError):
            JobConfig.from_dict(data)

    def test_load_yaml(self):
        """Test YAML job files."""
        path = self.job_dir / "job.yaml"
        path.write_text(
            "name: disk\nmodel:\n  n: 1\n  components: [[1], [0, 1]]\n"
            "grid: {chart: disk, n: 4}\noutput: {dir: meshes}\n",
            encoding="utf-8",
        )
        job = JobConfig.load(path)
        assert job.name == "disk"
        assert job.output_dir == Path("meshes")
        assert len(job.parameter_grid()) == 16

    def test_load_json(self):
        """Test JSON job files."""
        path = self.job_dir / "job.json"
        path.write_text(json.dumps({"preset": "cp1-sphere", "base_point": [0.5, 0]}), encoding="utf-8")
        assert JobConfig.load(path).base_point == 0.5

    def test_load_errors(self):
        """Test missing and malformed files."""
        with pytest.raises(ConfigError):
            JobConfig.load(self.job_dir / "missing.yaml")
        bad = self.job_dir / "bad.json"
        bad.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            JobConfig.load(bad)

    def test_overrides(self):
        """Test command-line overrides."""
        job = JobConfig.from_preset("cp1-sphere")
        assert job.with_overrides() is job
        changed = job.with_overrides(tol=1e-7, grid_n=5, chart="disk", out=self.job_dir)
        assert changed.tolerances.path_quadrature == 1e-7
        assert changed.tolerances.sphere_quadrature == 1e-7
        assert changed.grid["n"] == 5
        assert changed.grid["chart"] == "disk"
        assert changed.output_dir == self.job_dir
        assert job.grid["n"] == 32

    def test_to_dict(self):
        """Test the JSON view."""
        data = JobConfig.from_preset("ex2").to_dict()
        assert data["preset"] == "ex2"
        assert data["model"]["kind"] == "mixed"
