"""Generalized Weierstrass immersion X(ξ, ξ̄) ∈ su(N+1) by path integration."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import structlog
from numpy.typing import NDArray

from .errors import ConfigError, DimensionError
from .linalg import CMatrix, SuElement, complex_coords, coords, dagger, su_basis
from .logging_config import log_operation, log_operation_complete
from .model import CpnSolution, affine_point, default_base_point, k_raw, require_safe
from .numerics import Path, integrate_form
from .numerics.quadrature import PATH_TOLERANCE
from .utils import parallel_map

logger = structlog.get_logger()

# angular step of the polygonal arcs used to route paths around the origin
ARC_STEP = np.pi / 32

# rows S₁..S₈, columns printed dX₁..dX₈: dX₁, dX₂, dX₅, dX₈ are twice the
# S₇, S₅, S₆, S₈ coordinates, dX₆ twice S₂, dX₇ minus twice S₁, and dX₃, dX₄
# are −2i times the (1,1) and (2,2) entries of the dξ part
PRINTED_CP2_TO_BASIS = 0.25 * np.array(
    [
        [0, 0, 0, 0, 0, 0, -2, 0],
        [0, 0, 0, 0, 0, 2, 0, 0],
        [0, 0, -1, 1, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 0, 0],
        [0, 2, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 2, 0, 0, 0],
        [2, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 2],
    ],
    dtype=np.float64,
)

# S_k sign in dX = dX¹ + i dX² when printed label k is read as S_k
LITERAL_CP2_SIGNS = np.array([-1, 1, -1, -1, 1, 1, -1, -1], dtype=np.float64)


@dataclass(frozen=True)
class Immersion:
    """A solution together with the base point and value fixing X."""

    sol: CpnSolution
    base_point: complex
    base_value: SuElement
    tol: float = PATH_TOLERANCE

    @classmethod
    def create(
        cls,
        sol: CpnSolution,
        base_point: complex | None = None,
        base_value: SuElement | None = None,
        tol: float = PATH_TOLERANCE,
    ) -> Immersion:
        """Build an immersion, choosing the default base point when none is given.

        Raises:
            SingularPointError: If the base point is not safe
        """
        pt = default_base_point(sol) if base_point is None else complex(base_point)
        require_safe(sol, pt, "base_point")
        value = SuElement.zero(sol.dim) if base_value is None else base_value
        if value.dim != sol.dim:
            raise DimensionError("Base value has the wrong size", dim=value.dim, expected=sol.dim)
        return cls(sol=sol, base_point=pt, base_value=value, tol=tol)

    def one_form(self, pt: complex) -> tuple[CMatrix, CMatrix]:
        """(i𝕂†, i𝕂): coefficients of dξ and dξ̄ in dX."""
        K = k_raw(self.sol, pt)
        return 1j * dagger(K), 1j * K


@dataclass(frozen=True)
class ImmersionSample:
    pt: complex
    X: SuElement
    coords: NDArray[np.float64]
    dX: CMatrix
    dbarX: CMatrix

    def to_dict(self) -> dict[str, Any]:
        return {"pt": self.pt, "coords": self.coords, "X": self.X.mat}


def _project_su(mat: CMatrix) -> CMatrix:
    skew = 0.5 * (mat - dagger(mat))
    return skew - np.trace(skew) / skew.shape[0] * np.eye(skew.shape[0])


def route(start: complex, end: complex) -> Path:
    """Path from start to end: along the circle |ξ| = |start|, then radially.

    Straight when start is the origin or the two points share an argument.
    """
    start, end = complex(start), complex(end)
    radius = abs(start)
    if radius == 0.0 or end == 0.0:
        return Path.straight(start, end)
    a0, a1 = np.angle(start), np.angle(end)
    sweep = (a1 - a0 + np.pi) % (2 * np.pi) - np.pi
    steps = int(np.ceil(abs(sweep) / ARC_STEP))
    points = [start]
    for k in range(1, steps + 1):
        points.append(radius * np.exp(1j * (a0 + sweep * k / steps)))
    if abs(points[-1] - end) > 0:
        points.append(end)
    if len(points) == 1:
        points.append(end)
    return Path(tuple(points))


def immerse(im: Immersion, pt: complex, path: Path | None = None) -> ImmersionSample:
    """X(pt) = base_value + i∫(𝕂†dξ + 𝕂dξ̄) along path.

    Raises:
        ConfigError: If the path does not run from the base point to pt
        SingularPointError: If the path passes near a singularity
        QuadratureError: If the integral does not converge
    """
    pt = complex(pt)
    path = Path.straight(im.base_point, pt) if path is None else path
    scale = max(1.0, abs(pt))
    if abs(path.start - im.base_point) > 1e-12 * scale or abs(path.end - pt) > 1e-12 * scale:
        raise ConfigError(
            "Path must run from the base point to the target",
            start=path.start,
            end=path.end,
            base_point=im.base_point,
            target=pt,
        )
    path.require_safe(im.sol.registry)
    require_safe(im.sol, pt, "immerse")
    delta = integrate_form(im.one_form, path, im.tol)
    return _sample(im, pt, im.base_value.mat + _project_su(delta))


def _sample(im: Immersion, pt: complex, mat: CMatrix) -> ImmersionSample:
    X = SuElement(_project_su(mat))
    dX, dbarX = im.one_form(pt)
    return ImmersionSample(
        pt=complex(pt),
        X=X,
        coords=coords(X, su_basis(im.sol.dim)),
        dX=dX,
        dbarX=dbarX,
    )


def closedness_residual(im: Immersion, loop: Path) -> float:
    """Max-norm of ∮ dX around a closed loop.

    Raises:
        ConfigError: If the loop is open
    """
    if not loop.is_closed:
        raise ConfigError("Loop must be closed", start=loop.start, end=loop.end)
    loop.require_safe(im.sol.registry)
    value = integrate_form(im.one_form, loop, im.tol)
    return float(np.max(np.abs(value)))


def weierstrass_forms(sol: CpnSolution, pt: complex) -> NDArray[np.complex128]:
    """Coordinates of dX in su_basis: rows (coefficient of dξ, of dξ̄)."""
    require_safe(sol, pt, "weierstrass_forms")
    K = k_raw(sol, pt)
    basis = su_basis(sol.dim)
    return np.stack(
        [complex_coords(1j * dagger(K), basis), complex_coords(1j * K, basis)], axis=-1
    )


def published_cp1_forms(sol: CpnSolution, pt: complex) -> NDArray[np.complex128]:
    """Printed ℂP¹ forms dX₁, dX₂, dX₃ in terms of W, shape (3, 2)."""
    if sol.n != 1:
        raise DimensionError("CP1 forms need the CP1 model", n=sol.n)
    W, dW, dbW, _ = affine_point(sol, pt)
    w, c = W[0], np.conj(W[0])
    d_w, db_w = dW[0], dbW[0]
    d_c, db_c = np.conj(db_w), np.conj(d_w)
    A2 = (1.0 + abs(w) ** 2) ** 2
    return np.array(
        [
            [
                -0.5j * (d_c + c**2 * d_w + d_w + w**2 * d_c) / A2,
                0.5j * (db_c + c**2 * db_w + db_w + w**2 * db_c) / A2,
            ],
            [
                0.5 * (-d_c - c**2 * d_w + d_w + w**2 * d_c) / A2,
                0.5 * (db_c + c**2 * db_w - db_w - w**2 * db_c) / A2,
            ],
            [(w * d_c - c * d_w) / A2, (c * db_w - w * db_c) / A2],
        ],
        dtype=np.complex128,
    )


def weierstrass_forms_cp2(sol: CpnSolution, pt: complex) -> NDArray[np.complex128]:
    """Printed ℂP² forms dX₁..dX₈ in terms of W₁, W₂ and ρ, shape (8, 2).

    Columns are the coefficients of dξ and dξ̄. The labels follow matrix
    entries of dX, not the generators; :func:`assemble_cp2_forms` maps them
    onto S₁..S₈.

    Raises:
        DimensionError: Unless n = 2
        SingularPointError: Where the affine chart f₀ = 0 breaks down
    """
    if sol.n != 2:
        raise DimensionError("Coordinate forms in S1..S8 need the CP2 model", n=sol.n)
    W, dW, dbW, _ = affine_point(sol, pt)
    w1, w2 = W
    c1, c2 = np.conj(W)
    d1, d2 = dW
    db1, db2 = dbW
    dc1, dc2 = np.conj(dbW)
    dbc1, dbc2 = np.conj(dW)
    A = 1.0 + abs(w1) ** 2 + abs(w2) ** 2
    rho = c1 * d1 - w1 * dc1 + c2 * d2 - w2 * dc2
    rb = np.conj(rho)

    def pair(a: complex, b: complex, mixed: complex) -> list[complex]:
        return [a / A + rho * mixed / A**2, b / A + rb * mixed / A**2]

    x1 = pair(dc1 - d1, db1 - dbc1, c1 + w1)
    x2 = [-1j * v for v in pair(d1 + dc1, -(dbc1 + db1), c1 - w1)]
    x3 = [2 * v for v in pair(w1 * dc1 - c1 * d1, c1 * db1 - w1 * dbc1, abs(w1) ** 2)]
    x4 = [2 * v for v in pair(w2 * dc2 - c2 * d2, c2 * db2 - w2 * dbc2, abs(w2) ** 2)]
    x5 = [-1j * v for v in pair(d2 + dc2, -(dbc2 + db2), c2 - w2)]
    x6 = [
        -1j * v
        for v in pair(
            w1 * dc2 - c2 * d1 - w2 * dc1 + c1 * d2,
            c2 * db1 - w1 * dbc2 - c1 * db2 + w2 * dbc1,
            w1 * c2 - c1 * w2,
        )
    ]
    x7 = pair(
        w1 * dc2 - c2 * d1 + w2 * dc1 - c1 * d2,
        c2 * db1 - w1 * dbc2 + c1 * db2 - w2 * dbc1,
        w1 * c2 + c1 * w2,
    )
    x8 = pair(dc2 - d2, db2 - dbc2, c2 + w2)
    return np.array([x1, x2, x3, x4, x5, x6, x7, x8], dtype=np.complex128)


def assemble_cp2_forms(forms: NDArray[np.complex128]) -> tuple[CMatrix, CMatrix]:
    """dξ and dξ̄ parts of dX from a (8, 2) array of printed forms."""
    stack = su_basis(3).stack
    coeffs = PRINTED_CP2_TO_BASIS @ np.asarray(forms, dtype=np.complex128)
    return (
        np.einsum("k,kij->ij", coeffs[:, 0], stack),
        np.einsum("k,kij->ij", coeffs[:, 1], stack),
    )


def cp2_forms_residual(sol: CpnSolution, pt: complex) -> float:
    """Max gap between the assembled printed forms and (i𝕂†, i𝕂)."""
    dxi, dxib = assemble_cp2_forms(weierstrass_forms_cp2(sol, pt))
    K = k_raw(sol, pt)
    return float(max(np.max(np.abs(dxi - 1j * dagger(K))), np.max(np.abs(dxib - 1j * K))))


def literal_cp2_gaps(sol: CpnSolution, pt: complex) -> NDArray[np.float64]:
    """Per generator, |±dXₖ − cₖ| with the printed label k read as the S_k coordinate.

    cₖ are the coordinates of dX from :func:`weierstrass_forms`; the sign is
    the one dX = dX¹ + i dX² gives S_k. Nonzero gaps mark the generators whose
    printed label does not match.
    """
    printed = LITERAL_CP2_SIGNS[:, None] * weierstrass_forms_cp2(sol, pt)
    return np.max(np.abs(printed - weierstrass_forms(sol, pt)), axis=1)


@dataclass(frozen=True)
class ParameterGrid:
    """Vertices in the ξ-plane with quad faces and integration lines.

    Each line is a vertex sequence; its first vertex is reached from the base
    point by :func:`route` and the rest by short straight segments.
    """

    points: NDArray[np.complex128]
    faces: tuple[tuple[int, int, int, int], ...]
    lines: tuple[tuple[int, ...], ...]
    kind: str = "custom"
    shape: tuple[int, int] = (0, 0)
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise ConfigError("Parameter grid is empty")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_radii(cls, radii: Sequence[float], n_phi: int, kind: str = "polar") -> ParameterGrid:
        """Polar grid on the given radii with n_phi angles (faces wrap in angle)."""
        r = np.asarray(radii, dtype=np.float64)
        if r.size == 0 or n_phi < 1 or np.any(r < 0):
            raise ConfigError("Polar grid needs radii >= 0 and at least one angle")
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        pts = (r[None, :] * np.exp(1j * phi)[:, None]).ravel()
        n_r = r.size

        def index(j: int, i: int) -> int:
            return (j % n_phi) * n_r + i

        faces = tuple(
            (index(j, i), index(j, i + 1), index(j + 1, i + 1), index(j + 1, i))
            for j in range(n_phi if n_phi > 2 else n_phi - 1)
            for i in range(n_r - 1)
        )
        lines = tuple(tuple(index(j, i) for i in range(n_r)) for j in range(n_phi))
        meta = {"r_min": float(r.min()), "r_max": float(r.max()), "n_phi": n_phi}
        return cls(pts, faces, lines, kind=kind, shape=(n_phi, n_r), meta=meta)

    @classmethod
    def polar(
        cls, n: int, r_min: float, r_max: float, n_phi: int | None = None
    ) -> ParameterGrid:
        if n < 1 or not 0.0 <= r_min <= r_max:
            raise ConfigError("Polar grid needs n >= 1 and 0 <= r_min <= r_max", n=n)
        return cls.from_radii(np.linspace(r_min, r_max, n), n_phi or n, kind="polar")

    @classmethod
    def disk(cls, n: int, radius: float = 1.0) -> ParameterGrid:
        grid = cls.polar(n, 0.0, radius)
        return ParameterGrid(grid.points, grid.faces, grid.lines, "disk", grid.shape, grid.meta)

    @classmethod
    def both(cls, n: int, r_far: float = 10.0) -> ParameterGrid:
        """Unit disk plus the inverted chart out to |ξ| = r_far."""
        if r_far <= 1.0:
            raise ConfigError("Outer radius must exceed 1", r_far=r_far)
        inner = np.linspace(0.0, 1.0, n)
        outer = 1.0 / np.linspace(1.0, 1.0 / r_far, n)[1:]
        return cls.from_radii(np.concatenate([inner, outer]), n, kind="both")

    @classmethod
    def rect(
        cls, n: int, x_range: tuple[float, float], y_range: tuple[float, float]
    ) -> ParameterGrid:
        if n < 1:
            raise ConfigError("Rectangular grid needs n >= 1", n=n)
        xs = np.linspace(*x_range, n)
        ys = np.linspace(*y_range, n)
        pts = (xs[None, :] + 1j * ys[:, None]).ravel()
        faces = tuple(
            (j * n + i, j * n + i + 1, (j + 1) * n + i + 1, (j + 1) * n + i)
            for j in range(n - 1)
            for i in range(n - 1)
        )
        lines = tuple(tuple(j * n + i for i in range(n)) for j in range(n))
        meta = {"x_range": list(x_range), "y_range": list(y_range)}
        return cls(pts, faces, lines, kind="rect", shape=(n, n), meta=meta)

    @classmethod
    def from_spec(cls, spec: dict[str, Any]) -> ParameterGrid:
        """Build from a job-file grid section.

        Raises:
            ConfigError: For unknown charts or bad parameters
        """
        chart = spec.get("chart", "polar")
        n = int(spec.get("n", 32))
        if chart == "polar":
            return cls.polar(
                n, float(spec.get("r_min", 0.0)), float(spec.get("r_max", 1.0)), spec.get("n_phi")
            )
        if chart == "disk":
            return cls.disk(n, float(spec.get("radius", 1.0)))
        if chart == "both":
            return cls.both(n, float(spec.get("r_far", 10.0)))
        if chart == "rect":
            return cls.rect(
                n, tuple(spec.get("x_range", (-1.0, 1.0))), tuple(spec.get("y_range", (-1.0, 1.0)))
            )
        raise ConfigError("Unknown grid chart", chart=chart)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "vertices": len(self.points),
            "faces": len(self.faces),
            **self.meta,
        }


def _immerse_line(im: Immersion, grid: ParameterGrid, line: tuple[int, ...]) -> list[CMatrix]:
    first = complex(grid.points[line[0]])
    start = immerse(im, first, route(im.base_point, first))
    values = [start.X.mat]
    current = start.X.mat
    for prev, nxt in zip(line[:-1], line[1:], strict=True):
        a, b = complex(grid.points[prev]), complex(grid.points[nxt])
        if a != b:
            segment = Path.straight(a, b)
            segment.require_safe(im.sol.registry)
            current = current + integrate_form(im.one_form, segment, im.tol)
        values.append(current)
    return values


def immerse_grid(
    im: Immersion, grid: ParameterGrid, threads: int = 1
) -> list[ImmersionSample]:
    """X at every grid vertex, marching along the grid lines.

    Lines are independent and may run on several threads; the result does not
    depend on the thread count.
    """
    ctx = log_operation(
        logger, "immerse_grid", vertices=len(grid), lines=len(grid.lines), threads=threads
    )
    try:
        results = parallel_map(lambda ln: _immerse_line(im, grid, ln), grid.lines, threads)
    except Exception as e:
        log_operation_complete(logger, ctx, success=False, error=str(e))
        raise

    mats: dict[int, CMatrix] = {}
    for line, values in zip(grid.lines, results, strict=True):
        for idx, value in zip(line, values, strict=True):
            mats.setdefault(idx, value)
    missing = [i for i in range(len(grid)) if i not in mats]
    if missing:
        raise ConfigError("Grid vertices are not covered by any line", count=len(missing))
    samples = [_sample(im, complex(grid.points[i]), mats[i]) for i in range(len(grid))]
    log_operation_complete(logger, ctx, success=True)
    return samples


@dataclass
class MeshSummary:
    vertices: int
    faces: int
    bbox_min: NDArray[np.float64]
    bbox_max: NDArray[np.float64]
    files: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertices": self.vertices,
            "faces": self.faces,
            "bbox_min": self.bbox_min,
            "bbox_max": self.bbox_max,
            "files": list(self.files),
        }


def project_coords(coords_: NDArray[np.float64], method: str = "first3") -> NDArray[np.float64]:
    """Reduce full coordinates to three for OBJ/PLY.

    Raises:
        ConfigError: For an unknown method
    """
    data = np.asarray(coords_, dtype=np.float64)
    if method == "first3":
        out = data[:, :3]
    elif method == "pca":
        centered = data - data.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        out = centered @ vt[:3].T
    else:
        raise ConfigError("Unknown projection", project=method)
    if out.shape[1] < 3:
        out = np.hstack([out, np.zeros((out.shape[0], 3 - out.shape[1]))])
    return out


def export_mesh(
    im: Immersion,
    grid: ParameterGrid,
    out: Any,
    project: str = "first3",
    formats: Sequence[str] = ("obj", "ply", "csv"),
    name: str = "mesh",
    threads: int = 1,
) -> MeshSummary:
    """Immerse the grid and write it through a mesh sink.

    ``out`` is a :class:`cpnsurf.emit.MeshEmitter`.
    """
    samples = immerse_grid(im, grid, threads)
    full = np.array([s.coords for s in samples])
    pts = np.array([s.pt for s in samples])
    xyz = project_coords(full, project)
    files = []
    for fmt in formats:
        if fmt == "obj":
            files.append(out.write_obj(name, xyz, grid.faces))
        elif fmt == "ply":
            files.append(out.write_ply(name, xyz, grid.faces))
        elif fmt == "csv":
            files.append(out.write_coords_csv(name, pts, full))
        else:
            raise ConfigError("Unknown mesh format", format=fmt)
    return MeshSummary(
        vertices=len(samples),
        faces=len(grid.faces),
        bbox_min=full.min(axis=0),
        bbox_max=full.max(axis=0),
        files=[str(f) for f in files],
    )
