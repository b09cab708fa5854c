"""Exception hierarchy for cpnsurf.

Every error carries keyword context that is logged by the CLI and mapped to a
process exit code (2 for configuration/usage problems, 3 for numeric failures).
"""

from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class CpnError(Exception):
    """Base class for all cpnsurf errors."""

    exit_code = EXIT_NUMERIC

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready description of the error."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "context": {k: _plain(v) for k, v in self.context.items()},
        }


class ConfigError(CpnError):
    """Job file, preset or solution schema violation."""

    exit_code = EXIT_CONFIG


class DimensionError(CpnError):
    """Mismatched matrix sizes or model index."""

    exit_code = EXIT_CONFIG


class LieAlgebraError(CpnError):
    """Matrix is not in su(N+1) or SU(N+1) within tolerance."""

    exit_code = EXIT_CONFIG


class DegenerateGeneratorsError(CpnError):
    """Wronskian generators are proportional."""

    exit_code = EXIT_CONFIG


class SingularPointError(CpnError):
    """Evaluation too close to a registered singularity or a zero of f."""


class QuadratureError(CpnError):
    """Adaptive quadrature failed to converge."""


class DegenerateMetricError(CpnError):
    """Induced metric determinant below threshold."""


class RankDeficiencyError(CpnError):
    """Immersion tangents are linearly dependent."""


class FrameDiscontinuityError(CpnError):
    """Gram-Schmidt pivots changed inside a finite-difference stencil."""


class NotASolutionError(CpnError):
    """Geometry requested for a field that fails the Euler-Lagrange check."""


def _plain(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)
