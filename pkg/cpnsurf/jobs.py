"""Job files: solution schema, grid, base point, tolerances and outputs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any

import structlog
import yaml

from .errors import ConfigError
from .immersion import Immersion, ParameterGrid
from .model import (
    CpnSolution,
    SolutionKind,
    from_fields,
    make_antiholomorphic,
    make_holomorphic,
    make_mixed_cp2,
)
from .numerics import RationalFn, parse_coefficient
from .numerics.rational import PARSE_LOCALS
from .presets import PresetManager
from .settings import DEFAULT_TOLERANCES, Tolerances

logger = structlog.get_logger()

JOB_KEYS = frozenset(
    {"name", "model", "preset", "params", "grid", "base_point", "tolerances", "output", "options"}
)
MODEL_KEYS = frozenset({"n", "kind", "name", "components", "generators", "fields"})
DEFAULT_OUTPUT_DIR = Path("out")


def _render(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return repr(value)
    c = complex(parse_coefficient(value))
    return f"{c.real!r} + ({c.imag!r})*I"


def substitute_params(value: Any, params: dict[str, Any]) -> Any:
    """Replace parameter names inside string coefficients and expressions.

    Raises:
        ConfigError: If a parameter name is not an identifier or shadows a
            reserved symbol such as ``xi``
    """
    if not params:
        return value
    patterns = []
    for name, raw in params.items():
        if not re.fullmatch(r"[A-Za-z_]\w*", name) or name in PARSE_LOCALS:
            raise ConfigError("Invalid parameter name", name=name)
        patterns.append((re.compile(rf"(?<![\w.]){re.escape(name)}(?!\w)"), f"({_render(raw)})"))

    def walk(item: Any) -> Any:
        if isinstance(item, str):
            for pattern, text in patterns:
                item = pattern.sub(text, item)
            return item
        if isinstance(item, list):
            return [walk(v) for v in item]
        if isinstance(item, dict):
            return {k: walk(v) for k, v in item.items()}
        return item

    return walk(value)


def _infer_kind(spec: dict[str, Any]) -> SolutionKind:
    present = [k for k in ("components", "generators", "fields") if k in spec]
    if len(present) != 1:
        raise ConfigError(
            "Model needs exactly one of components, generators or fields", found=present
        )
    return {
        "components": SolutionKind.HOLOMORPHIC,
        "generators": SolutionKind.MIXED,
        "fields": SolutionKind.FIELDS,
    }[present[0]]


def _entries(spec: dict[str, Any], key: str, count: int | None) -> list[Any]:
    entries = spec.get(key)
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"Model '{key}' must be a non-empty list", kind=spec.get("kind"))
    if count is not None and len(entries) != count:
        raise ConfigError(
            f"Model '{key}' has the wrong length", expected=count, found=len(entries)
        )
    return entries


def solution_from_spec(
    spec: Any,
    params: dict[str, Any] | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    name: str = "",
) -> CpnSolution:
    """Construct a solution from the JSON solution schema.

    ``{"n": 2, "kind": "holomorphic", "components": [...]}``; ``kind`` may be
    omitted and is then inferred from which list is present.

    Raises:
        ConfigError: On any schema violation
    """
    if not isinstance(spec, dict):
        raise ConfigError("Model must be a mapping", model=repr(spec))
    unknown = sorted(set(spec) - MODEL_KEYS)
    if unknown:
        raise ConfigError("Unknown model keys", keys=unknown)
    if "n" not in spec:
        raise ConfigError("Model is missing 'n'")
    n = spec["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("Model index 'n' must be a positive integer", n=repr(n))

    spec = substitute_params(spec, params or {})
    try:
        kind = SolutionKind(spec["kind"]) if "kind" in spec else _infer_kind(spec)
    except ValueError as e:
        raise ConfigError("Unknown solution kind", kind=spec.get("kind")) from e

    label = spec.get("name", name)
    tol = tolerances.solution_check
    if kind in (SolutionKind.HOLOMORPHIC, SolutionKind.ANTIHOLOMORPHIC):
        comps = [RationalFn.from_spec(c) for c in _entries(spec, "components", n + 1)]
        build = make_holomorphic if kind is SolutionKind.HOLOMORPHIC else make_antiholomorphic
        sol = build(n, comps, name=label, tol=tol)
    elif kind is SolutionKind.MIXED:
        if n != 2:
            raise ConfigError("Mixed solutions exist only for n = 2", n=n)
        gens = [RationalFn.from_spec(g) for g in _entries(spec, "generators", 3)]
        sol = make_mixed_cp2(gens, name=label, tol=tol)
    else:
        exprs = _entries(spec, "fields", n + 1)
        if not all(isinstance(e, str) for e in exprs):
            raise ConfigError("Field entries must be expression strings")
        sol = from_fields(n, exprs, name=label, tol=tol)

    if tolerances.exclusion_radius != sol.registry.radius:
        sol = sol.with_radius(tolerances.exclusion_radius)
    return sol


def parse_point(value: Any) -> complex:
    """Read a base point written as ``[re, im]``, a number or a string.

    Raises:
        ConfigError: If the value is not a complex constant
    """
    try:
        return complex(parse_coefficient(value))
    except TypeError as e:
        raise ConfigError("Point is not a complex constant", value=repr(value)) from e


@dataclass
class JobConfig:
    """A resolved job: preset defaults merged with the job file."""

    model: dict[str, Any]
    name: str = "job"
    preset: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, Any] = field(default_factory=dict)
    base_point: complex | None = None
    tolerances: Tolerances = DEFAULT_TOLERANCES
    output_dir: Path = DEFAULT_OUTPUT_DIR
    options: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(
        cls, data: dict[str, Any], manager: PresetManager | None = None
    ) -> JobConfig:
        """Validate a job document and merge it over its preset.

        Raises:
            ConfigError: On unknown keys, an unknown preset or a missing model
        """
        if not isinstance(data, dict):
            raise ConfigError("Job file must contain a mapping")
        unknown = sorted(set(data) - JOB_KEYS)
        if unknown:
            raise ConfigError("Unknown job keys", keys=unknown)

        base: dict[str, Any] = {}
        preset_name = data.get("preset")
        if preset_name is not None:
            manager = manager or PresetManager()
            base = manager.require_preset(str(preset_name)).to_job_dict()

        model = data.get("model", base.get("model"))
        if not model:
            raise ConfigError("Job needs a model or a preset")

        output = data.get("output", {})
        if not isinstance(output, dict):
            raise ConfigError("Job 'output' must be a mapping")
        for key in ("params", "grid", "tolerances", "options"):
            if not isinstance(data.get(key, {}), dict):
                raise ConfigError(f"Job '{key}' must be a mapping")

        raw_point = data.get("base_point", base.get("base_point"))
        tolerances = DEFAULT_TOLERANCES.with_overrides(
            {**base.get("tolerances", {}), **data.get("tolerances", {})}
        )
        return cls(
            model=model,
            name=str(data.get("name") or preset_name or "job"),
            preset=preset_name,
            params={**base.get("params", {}), **data.get("params", {})},
            grid={**base.get("grid", {}), **data.get("grid", {})},
            base_point=None if raw_point is None else parse_point(raw_point),
            tolerances=tolerances,
            output_dir=Path(output.get("dir", DEFAULT_OUTPUT_DIR)),
            options={**base.get("options", {}), **data.get("options", {})},
        )

    @classmethod
    def load(cls, path: Path, manager: PresetManager | None = None) -> JobConfig:
        """Read a JSON or YAML job file.

        Raises:
            ConfigError: If the file is missing, unreadable or invalid
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError("Cannot read job file", path=str(path), error=str(e)) from e

        try:
            if path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(text)
            else:
                data = json.loads(text)
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigError("Malformed job file", path=str(path), error=str(e)) from e

        logger.debug("Loaded job file", path=str(path))
        return cls.from_dict(data, manager)

    @classmethod
    def from_preset(cls, name: str, manager: PresetManager | None = None) -> JobConfig:
        return cls.from_dict({"preset": name}, manager)

    def with_overrides(
        self,
        tol: float | None = None,
        grid_n: int | None = None,
        chart: str | None = None,
        out: Path | None = None,
    ) -> JobConfig:
        """Apply command-line flags; ``tol`` replaces both quadrature tolerances."""
        changes: dict[str, Any] = {}
        if tol is not None:
            changes["tolerances"] = self.tolerances.with_overrides(
                {"path_quadrature": tol, "sphere_quadrature": tol}
            )
        if grid_n is not None or chart is not None:
            grid = dict(self.grid)
            if grid_n is not None:
                grid["n"] = grid_n
            if chart is not None:
                grid["chart"] = chart
            changes["grid"] = grid
        if out is not None:
            changes["output_dir"] = Path(out)
        return replace(self, **changes) if changes else self

    @cached_property
    def solution(self) -> CpnSolution:
        return solution_from_spec(self.model, self.params, self.tolerances, name=self.name)

    def parameter_grid(self) -> ParameterGrid:
        return ParameterGrid.from_spec(self.grid)

    def immersion(self) -> Immersion:
        return Immersion.create(
            self.solution, self.base_point, tol=self.tolerances.path_quadrature
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "preset": self.preset,
            "model": self.model,
            "params": self.params,
            "grid": self.grid,
            "base_point": self.base_point,
            "output_dir": str(self.output_dir),
            "options": self.options,
        }
