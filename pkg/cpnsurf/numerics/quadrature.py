"""Path integration of matrix 1-forms and quadrature over the plane and sphere."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy.integrate import quad_vec

from ..errors import ConfigError, QuadratureError
from ..utils import parallel_map
from .fields import SingularityRegistry

logger = structlog.get_logger()

PATH_TOLERANCE = 1e-10
SPHERE_TOLERANCE = 1e-6
MAX_REFINEMENT_LEVELS = 20
MAX_SPHERE_LEVELS = 8
# quad_vec subinterval budget for one attempt before a segment is bisected
_SUBINTERVAL_LIMIT = 200

OneForm = Callable[[complex], tuple[NDArray[np.complex128], NDArray[np.complex128]]]
Density = Callable[[NDArray[np.complex128]], NDArray[np.float64]]


@dataclass(frozen=True)
class Path:
    """Polyline ξ₀ → ξ₁ → … → ξ_m in the parameter plane."""

    points: tuple[complex, ...]

    def __post_init__(self) -> None:
        pts = tuple(complex(p) for p in self.points)
        if len(pts) < 2:
            raise ConfigError("Path needs at least two points", count=len(pts))
        if not all(np.isfinite(p.real) and np.isfinite(p.imag) for p in pts):
            raise ConfigError("Path points must be finite")
        object.__setattr__(self, "points", pts)

    @classmethod
    def straight(cls, start: complex, end: complex) -> Path:
        return cls((start, end))

    @classmethod
    def via(cls, *points: complex) -> Path:
        return cls(tuple(points))

    @classmethod
    def square_loop(cls, center: complex, half_width: float) -> Path:
        """Counter-clockwise square loop (closed)."""
        h = float(half_width)
        corners = [center + h * (-1 - 1j), center + h * (1 - 1j), center + h * (1 + 1j)]
        corners += [center + h * (-1 + 1j), center + h * (-1 - 1j)]
        return cls(tuple(corners))

    @classmethod
    def circle(cls, center: complex, radius: float, segments: int = 64) -> Path:
        """Closed polygonal approximation of a circle."""
        angles = np.linspace(0.0, 2 * np.pi, segments + 1)
        pts = center + radius * np.exp(1j * angles)
        pts[-1] = pts[0]
        return cls(tuple(pts))

    @property
    def start(self) -> complex:
        return self.points[0]

    @property
    def end(self) -> complex:
        return self.points[-1]

    @property
    def is_closed(self) -> bool:
        return abs(self.start - self.end) <= 1e-14 * max(1.0, abs(self.start))

    @property
    def length(self) -> float:
        return float(sum(abs(b - a) for a, b in self.segments()))

    def segments(self) -> list[tuple[complex, complex]]:
        return list(zip(self.points[:-1], self.points[1:], strict=True))

    def reversed(self) -> Path:
        return Path(tuple(reversed(self.points)))

    def concat(self, other: Path) -> Path:
        """This path followed by other (other must start where this ends)."""
        if abs(self.end - other.start) > 1e-12 * max(1.0, abs(self.end)):
            raise ConfigError(
                "Paths do not join", end=self.end, start=other.start
            )
        return Path(self.points + other.points[1:])

    def require_safe(self, registry: SingularityRegistry) -> None:
        """Raise SingularPointError if any segment passes near a singularity."""
        for a, b in self.segments():
            registry.require_safe_segment(a, b, what="path")


def _stack(mat: NDArray[np.complex128]) -> NDArray[np.float64]:
    flat = np.asarray(mat, dtype=np.complex128).ravel()
    return np.concatenate([flat.real, flat.imag])


def _integrate_segment(
    omega: OneForm,
    a: complex,
    b: complex,
    tol: float,
    shape: tuple[int, ...],
    level: int = 0,
) -> tuple[NDArray[np.float64], float]:
    delta = b - a

    def integrand(s: float) -> NDArray[np.float64]:
        coef, coef_bar = omega(a + s * delta)
        return _stack(coef * delta + coef_bar * np.conj(delta))

    value, error, info = quad_vec(
        integrand,
        0.0,
        1.0,
        epsabs=tol,
        epsrel=tol,
        norm="max",
        quadrature="gk15",
        limit=_SUBINTERVAL_LIMIT,
        full_output=True,
    )
    bound = tol * (1.0 + float(np.max(np.abs(value))))
    if info.status == 0 and error <= bound:
        return np.asarray(value), float(error)

    if level >= MAX_REFINEMENT_LEVELS:
        raise QuadratureError(
            "Path quadrature did not converge",
            segment=[a, b],
            error=float(error),
            tolerance=bound,
            levels=level,
        )
    logger.debug("Bisecting path segment", start=a, end=b, level=level, error=error)
    mid = a + 0.5 * delta
    left, e_left = _integrate_segment(omega, a, mid, tol, shape, level + 1)
    right, e_right = _integrate_segment(omega, mid, b, tol, shape, level + 1)
    return left + right, e_left + e_right


def integrate_form(
    omega: OneForm,
    path: Path,
    tol: float = PATH_TOLERANCE,
) -> NDArray[np.complex128]:
    """∫_path (A dξ + B dξ̄) for a matrix-valued 1-form.

    Each segment is integrated with adaptive Gauss–Kronrod (7/15); segments
    whose error estimate stays above tol·(1 + |result|) are bisected up to
    MAX_REFINEMENT_LEVELS times.

    Args:
        omega: Callable returning the (dξ, dξ̄) coefficient matrices at ξ
        path: Integration path
        tol: Relative/absolute tolerance per segment

    Raises:
        QuadratureError: If a segment fails to converge
    """
    first, _ = omega(path.start)
    shape = np.shape(first)
    size = int(np.prod(shape)) if shape else 1

    pieces = []
    for a, b in path.segments():
        if a == b:
            continue
        value, _ = _integrate_segment(omega, a, b, tol, shape)
        pieces.append(value)

    if not pieces:
        return np.zeros(shape, dtype=np.complex128)
    total = np.sum(np.stack(pieces), axis=0)
    out = total[:size] + 1j * total[size:]
    return out.reshape(shape)


def wirtinger_fd(
    fn: Callable[[complex], Any], pt: complex, h: float
) -> tuple[Any, Any]:
    """Central-difference (∂fn, ∂̄fn) at pt with step h."""
    fx = (np.asarray(fn(pt + h)) - np.asarray(fn(pt - h))) / (2 * h)
    fy = (np.asarray(fn(pt + 1j * h)) - np.asarray(fn(pt - 1j * h))) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def map_points(
    fn: Callable[[complex], float],
    points: NDArray[np.complex128],
    threads: int = 1,
) -> NDArray[np.float64]:
    """Evaluate a scalar per-point function over an array, order preserved."""
    flat = [complex(p) for p in np.ravel(points)]
    values = parallel_map(fn, flat, threads)
    return np.asarray(values, dtype=np.float64).reshape(np.shape(points))


def _polar_rule(
    n_r: int, n_theta: int, r_min: float, r_max: float
) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
    """Nodes and weights for ∫∫ g r dr dθ on an annulus."""
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (r_max - r_min) * (x + 1.0) + r_min
    wr = 0.5 * (r_max - r_min) * w * r
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    wt = np.full(n_theta, 2 * np.pi / n_theta)
    nodes = r[:, None] * np.exp(1j * theta[None, :])
    weights = wr[:, None] * wt[None, :]
    return nodes, weights


@dataclass
class QuadratureResult:
    """Value of a refined quadrature with its convergence record."""

    value: float
    error: float
    levels: int
    history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "error": self.error,
            "levels": self.levels,
            "history": list(self.history),
        }


def _refine(
    evaluate: Callable[[int, int], float],
    tol: float,
    max_levels: int,
    n_r: int,
    n_theta: int,
    what: str,
) -> QuadratureResult:
    history: list[float] = []
    previous: float | None = None
    for level in range(max_levels):
        value = evaluate(n_r << level, n_theta << level)
        history.append(value)
        if previous is not None:
            gap = abs(value - previous)
            logger.debug(
                "Refined quadrature", kind=what, level=level, value=value, gap=gap
            )
            if gap <= tol * max(1.0, abs(value)):
                return QuadratureResult(value=value, error=gap, levels=level + 1, history=history)
        previous = value
    raise QuadratureError(
        "Quadrature did not converge",
        kind=what,
        levels=max_levels,
        history=history,
        tolerance=tol,
    )


def _vectorize(density: Callable[..., Any], vectorized: bool, threads: int) -> Density:
    if vectorized:
        return density

    def per_point(z: NDArray[np.complex128]) -> NDArray[np.float64]:
        return map_points(lambda p: float(density(p)), z, threads)

    return per_point


def sphere_quadrature(
    density: Callable[..., Any],
    tol: float = SPHERE_TOLERANCE,
    vectorized: bool = True,
    threads: int = 1,
    n_r: int = 8,
    n_theta: int = 16,
    max_levels: int = MAX_SPHERE_LEVELS,
    outer_density: Callable[..., Any] | None = None,
) -> QuadratureResult:
    """∫_ℂ density dA split into the unit disk and the inverted chart.

    The outer region |ξ| > 1 is mapped by ξ = 1/w. When outer_density is
    given it is the density already expressed in the w chart; otherwise
    density(1/w)·|w|⁻⁴ is used. Both charts use Gauss–Legendre in the radius
    and the trapezoid rule in the angle; resolution doubles until successive
    values agree to tol.

    Args:
        density: Real density per unit dx dy, called on arrays of points
            unless vectorized is False
        tol: Relative agreement between successive refinements
        vectorized: Whether the densities accept numpy arrays
        threads: Worker count for per-point densities
        outer_density: Density of the inverted chart on the unit disk

    Raises:
        QuadratureError: If max_levels refinements do not converge
    """
    fn = _vectorize(density, vectorized, threads)
    outer_fn = None if outer_density is None else _vectorize(
        outer_density, vectorized, threads
    )

    def evaluate(nr: int, nt: int) -> float:
        nodes, weights = _polar_rule(nr, nt, 0.0, 1.0)
        inner = np.sum(weights * np.asarray(fn(nodes), dtype=np.float64))
        if outer_fn is None:
            outer_vals = np.asarray(fn(1.0 / nodes), dtype=np.float64) / np.abs(nodes) ** 4
        else:
            outer_vals = np.asarray(outer_fn(nodes), dtype=np.float64)
        outer = np.sum(weights * outer_vals)
        return float(inner + outer)

    return _refine(evaluate, tol, max_levels, n_r, n_theta, "sphere")


def disk_quadrature(
    density: Callable[..., Any],
    r_min: float,
    r_max: float,
    tol: float = SPHERE_TOLERANCE,
    vectorized: bool = True,
    threads: int = 1,
    n_r: int = 8,
    n_theta: int = 16,
    max_levels: int = MAX_SPHERE_LEVELS,
) -> QuadratureResult:
    """∫ density dA over the annulus r_min ≤ |ξ| ≤ r_max.

    Raises:
        ConfigError: If the radii are not ordered
        QuadratureError: If refinement does not converge
    """
    if not 0.0 <= r_min < r_max:
        raise ConfigError("Annulus needs 0 <= r_min < r_max", r_min=r_min, r_max=r_max)
    fn = _vectorize(density, vectorized, threads)

    def evaluate(nr: int, nt: int) -> float:
        nodes, weights = _polar_rule(nr, nt, r_min, r_max)
        return float(np.sum(weights * np.asarray(fn(nodes), dtype=np.float64)))

    return _refine(evaluate, tol, max_levels, n_r, n_theta, "disk")


def concatenate(paths: Sequence[Path]) -> Path:
    """Join consecutive paths into one."""
    if not paths:
        raise ConfigError("No paths to concatenate")
    out = paths[0]
    for nxt in paths[1:]:
        out = out.concat(nxt)
    return out
