"""Runtime settings and numeric tolerances."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from .errors import ConfigError

DEFAULT_PRESET_DIR = Path(__file__).parent.parent / "config" / "presets"


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances shared by all modules."""

    path_quadrature: float = 1e-10
    sphere_quadrature: float = 1e-6
    exclusion_radius: float = 1e-3
    degenerate_metric: float = 1e-14
    conformal: float = 1e-10
    solution_check: float = 1e-8
    fd_step: float = 1e-5
    gcr_step: float = 1e-4

    def with_overrides(self, overrides: dict[str, Any]) -> Tolerances:
        """Return a copy with the given fields replaced.

        Raises:
            ConfigError: If an unknown tolerance name is given
        """
        known = set(asdict(self))
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError("Unknown tolerance keys", keys=unknown)
        try:
            values = {k: float(v) for k, v in overrides.items()}
        except (TypeError, ValueError) as e:
            raise ConfigError("Tolerances must be numbers", error=str(e)) from e
        return replace(self, **values)


@dataclass
class Settings:
    """Environment-derived settings (``.env`` is honoured)."""

    threads: int = 1
    json_logs: bool = False
    preset_dir: Path = field(default_factory=lambda: DEFAULT_PRESET_DIR)

    @classmethod
    def from_env(cls) -> Settings:
        """Build settings from the process environment."""
        load_dotenv(override=False)

        raw_threads = os.getenv("CPN_THREADS")
        if raw_threads is None:
            threads = os.cpu_count() or 1
        else:
            try:
                threads = max(1, int(raw_threads))
            except ValueError as e:
                raise ConfigError(
                    "CPN_THREADS must be an integer", value=raw_threads
                ) from e

        preset_dir = os.getenv("CPNSURF_PRESET_DIR")
        return cls(
            threads=threads,
            json_logs=bool(os.getenv("CPNSURF_JSON_LOGS")),
            preset_dir=Path(preset_dir) if preset_dir else DEFAULT_PRESET_DIR,
        )


DEFAULT_TOLERANCES = Tolerances()
