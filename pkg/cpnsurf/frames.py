"""Moving frames, Gauss–Weingarten matrices and the Gauss–Codazzi–Ricci check.

Frames are expressed in orthonormal coordinates of su(N+1): the fixed basis
divided by the square roots of its Gram diagonal, so the inner product
-½ tr(XY) becomes the plain (complex-bilinear) dot product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, NamedTuple

import numpy as np
import structlog
from numpy.typing import NDArray

from .errors import (
    DegenerateMetricError,
    DimensionError,
    FrameDiscontinuityError,
    NotASolutionError,
    RankDeficiencyError,
)
from .geometry import Tangents, tangents
from .linalg import CMatrix, SuElement, complex_coords, dagger, su_basis
from .logging_config import log_operation, log_operation_complete
from .model import CpnSolution, require_safe
from .numerics import wirtinger_fd
from .settings import DEFAULT_TOLERANCES, Tolerances

logger = structlog.get_logger()

RANK_TOLERANCE = 1e-8

# su(3) elements spanning the normal space of a holomorphic ℂP² frame
CP2_NORMAL_INDICES = (0, 1, 2, 3, 5, 7)


@dataclass(frozen=True)
class FrameState:
    """Tangents (∂X, ∂̄X) and orthonormal normals η₃..η_m at a point."""

    pt: complex
    tangents: tuple[CMatrix, CMatrix]
    normals: tuple[SuElement, ...]
    pivots: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return len(self.normals) + 2

    def residual(self) -> float:
        """Worst violation of (∂X, ηₖ) = (∂̄X, ηₖ) = 0 and (ηⱼ, ηₖ) = δⱼₖ."""
        dim = self.tangents[0].shape[0]
        t = np.array([_vector(m, dim) for m in self.tangents])
        n = np.array([_vector(e.mat, dim) for e in self.normals])
        if n.size == 0:
            return 0.0
        ortho = float(np.max(np.abs(n @ n.T - np.eye(len(n)))))
        scale = max(1.0, float(np.max(np.abs(t))))
        tangency = float(np.max(np.abs(t @ n.T))) / scale
        return max(ortho, tangency)

    def to_dict(self) -> dict[str, Any]:
        dim = self.tangents[0].shape[0]
        return {
            "pt": self.pt,
            "pivots": list(self.pivots),
            "tangents": [_vector(m, dim) for m in self.tangents],
            "normals": [_vector(e.mat, dim) for e in self.normals],
            "residual": self.residual(),
        }


class GWMatrices(NamedTuple):
    """∂η = Aη and ∂̄η = Bη for η = (∂X, ∂̄X, η₃, ...)."""

    A: NDArray[np.complex128]
    B: NDArray[np.complex128]

    @property
    def normal_antisymmetry(self) -> float:
        """max |S_jk + S_kj| over the normal block of A."""
        S = self.A[2:, 2:]
        return float(np.max(np.abs(S + S.T))) if S.size else 0.0


class Cp2Frame(NamedTuple):
    Phi: CMatrix
    frame: FrameState


@lru_cache(maxsize=8)
def _orthonormal_stack(dim: int) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
    basis = su_basis(dim)
    scale = np.sqrt(np.diag(basis.gram))
    return basis.stack / scale[:, None, None], scale


def _vector(mat: CMatrix, dim: int) -> NDArray[np.complex128]:
    """Complex coordinates of a traceless matrix in the orthonormal basis."""
    _, scale = _orthonormal_stack(dim)
    return complex_coords(mat, su_basis(dim)) * scale


def _matrix(vec: NDArray[Any], dim: int) -> CMatrix:
    stack, _ = _orthonormal_stack(dim)
    return np.einsum("k,kij->ij", vec, stack)


def _tangent_basis(t: Tangents, dim: int) -> NDArray[np.float64]:
    t1 = np.real(_vector(t.dX + t.dbX, dim))
    t2 = np.real(_vector(1j * (t.dX - t.dbX), dim))
    n1 = float(np.linalg.norm(t1))
    scale = max(n1, float(np.linalg.norm(t2)))
    if scale < RANK_TOLERANCE:
        raise RankDeficiencyError("Immersion tangents vanish", norm=scale)
    if n1 < RANK_TOLERANCE * scale:
        raise RankDeficiencyError("Immersion tangents are dependent", norm=scale)
    q1 = t1 / n1
    w = t2 - (t2 @ q1) * q1
    if np.linalg.norm(w) < RANK_TOLERANCE * scale:
        raise RankDeficiencyError(
            "Immersion tangents are dependent", residual=float(np.linalg.norm(w)), norm=scale
        )
    return np.array([q1, w / np.linalg.norm(w)])


def _complete(
    span: NDArray[np.float64], pivots: tuple[int, ...] | None
) -> tuple[NDArray[np.float64], tuple[int, ...]]:
    """Modified Gram–Schmidt of basis vectors against span.

    Without pivots, each step takes the unused basis vector with the largest
    residual (lowest index on ties). With pivots, exactly those are used.
    """
    m = span.shape[1]
    current = [v for v in span]
    normals: list[NDArray[np.float64]] = []
    chosen: list[int] = []
    count = m - len(current)

    def residual(k: int) -> NDArray[np.float64]:
        r = np.zeros(m)
        r[k] = 1.0
        for v in current:
            r = r - (r @ v) * v
        return r

    for step in range(count):
        if pivots is None:
            candidates = [k for k in range(m) if k not in chosen]
            residuals = [residual(k) for k in candidates]
            norms = [float(np.linalg.norm(r)) for r in residuals]
            best = int(np.argmax(norms))
            k, r, norm = candidates[best], residuals[best], norms[best]
            if norm < RANK_TOLERANCE:
                raise RankDeficiencyError("Frame completion ran out of directions", step=step)
        else:
            k = pivots[step]
            r = residual(k)
            norm = float(np.linalg.norm(r))
            if norm < RANK_TOLERANCE:
                raise FrameDiscontinuityError(
                    "Seeded basis vector fell into the span", pivot=k, residual=norm
                )
        v = r / norm
        current.append(v)
        normals.append(v)
        chosen.append(k)
    return np.array(normals).reshape(count, m), tuple(chosen)


def complete_frame(
    sol: CpnSolution,
    pt: complex,
    pivots: tuple[int, ...] | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FrameState:
    """Orthonormal normals completing (∂₁X, ∂₂X) to a frame of su(N+1).

    Raises:
        RankDeficiencyError: If the tangents are dependent
        FrameDiscontinuityError: If a given pivot no longer completes the frame
    """
    require_safe(sol, pt, "complete_frame")
    t = tangents(sol, pt)
    normals, chosen = _complete(_tangent_basis(t, sol.dim), pivots)
    return FrameState(
        pt=complex(pt),
        tangents=(t.dX, t.dbX),
        normals=tuple(SuElement(_skew(_matrix(v, sol.dim))) for v in normals),
        pivots=chosen,
    )


def _skew(mat: CMatrix) -> CMatrix:
    return 0.5 * (mat - dagger(mat))


def _normal_vectors(sol: CpnSolution, pt: complex, pivots: tuple[int, ...]) -> NDArray[np.float64]:
    t = tangents(sol, pt)
    normals, _ = _complete(_tangent_basis(t, sol.dim), pivots)
    return normals


def _gw_at(
    sol: CpnSolution, pt: complex, pivots: tuple[int, ...], tolerances: Tolerances
) -> GWMatrices:
    dim = sol.dim
    t = tangents(sol, pt)
    normals = _normal_vectors(sol, pt, pivots)
    d, db = _vector(t.dX, dim), _vector(t.dbX, dim)
    dd, ddb, dbdb = (_vector(m, dim) for m in (t.ddX, t.ddbX, t.dbdbX))

    G = np.array([[d @ d, d @ db], [db @ d, db @ db]])
    det = abs(np.linalg.det(G))
    if det < tolerances.degenerate_metric:
        raise DegenerateMetricError("Induced metric is degenerate", pt=complex(pt), det=det)

    J = normals @ dd
    H = normals @ ddb
    Jb = normals @ dbdb
    a1 = np.linalg.solve(G, np.array([dd @ d, dd @ db]))
    a2 = np.linalg.solve(G, np.array([dbdb @ d, dbdb @ db]))
    ab1 = np.linalg.solve(G, -np.vstack([J, H]))
    ab2 = np.linalg.solve(G, -np.vstack([H, Jb]))

    dN, dbN = wirtinger_fd(lambda p: _normal_vectors(sol, p, pivots), pt, tolerances.fd_step)
    S = dN @ normals.T
    Sb = dbN @ normals.T

    m = dim * dim - 1
    A = np.zeros((m, m), dtype=np.complex128)
    B = np.zeros((m, m), dtype=np.complex128)
    A[0, :2], A[0, 2:] = a1, J
    A[1, 2:] = H
    A[2:, 0], A[2:, 1], A[2:, 2:] = ab1[0], ab1[1], S
    B[0, 2:] = H
    B[1, :2], B[1, 2:] = a2, Jb
    B[2:, 0], B[2:, 1], B[2:, 2:] = ab2[0], ab2[1], Sb
    return GWMatrices(A=A, B=B)


def gauss_weingarten(
    sol: CpnSolution,
    pt: complex,
    frame: FrameState | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> GWMatrices:
    """Assemble A and B at pt for the frame's pivots.

    Normal derivatives S_jk = (∂ηⱼ, ηₖ) are central differences with step
    ``tolerances.fd_step``; a constant field gives A = B = 0.

    Raises:
        DegenerateMetricError: If the tangent Gram matrix is singular
    """
    m = sol.dim * sol.dim - 1
    if sol.is_constant:
        zero = np.zeros((m, m), dtype=np.complex128)
        return GWMatrices(A=zero, B=zero.copy())
    frame = complete_frame(sol, pt, tolerances=tolerances) if frame is None else frame
    return _gw_at(sol, pt, frame.pivots, tolerances)


def _frame_rows(sol: CpnSolution, pt: complex, pivots: tuple[int, ...]) -> NDArray[np.complex128]:
    t = tangents(sol, pt)
    return np.vstack(
        [_vector(t.dX, sol.dim), _vector(t.dbX, sol.dim), _normal_vectors(sol, pt, pivots)]
    )


def gw_defining_residual(
    sol: CpnSolution,
    pt: complex,
    frame: FrameState | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """max(|∂η − Aη|, |∂̄η − Bη|) with finite-difference ∂η, relative to |η|."""
    if sol.is_constant:
        return 0.0
    frame = complete_frame(sol, pt, tolerances=tolerances) if frame is None else frame
    gw = _gw_at(sol, pt, frame.pivots, tolerances)
    eta = _frame_rows(sol, pt, frame.pivots)
    d_eta, db_eta = wirtinger_fd(
        lambda p: _frame_rows(sol, p, frame.pivots), pt, tolerances.fd_step
    )
    scale = max(1.0, float(np.max(np.abs(eta))))
    lhs = float(np.max(np.abs(d_eta - gw.A @ eta)))
    rhs = float(np.max(np.abs(db_eta - gw.B @ eta)))
    return max(lhs, rhs) / scale


def _gcr(sol: CpnSolution, pt: complex, pivots: tuple[int, ...], tolerances: Tolerances) -> float:
    def stacked(p: complex) -> NDArray[np.complex128]:
        gw = _gw_at(sol, p, pivots, tolerances)
        return np.stack([gw.A, gw.B])

    center = _gw_at(sol, pt, pivots, tolerances)
    d, db = wirtinger_fd(stacked, pt, tolerances.gcr_step)
    dbar_A, d_B = db[0], d[1]
    residual = dbar_A - d_B + center.A @ center.B - center.B @ center.A
    return float(np.max(np.abs(residual)))


def gcr_residual(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Max-norm of ∂̄A − ∂B + [A, B] with central differences of step gcr_step.

    All stencil points share the pivots chosen at pt. If a pivot degenerates
    inside the stencil the frame is re-seeded once at a nearby point.

    Raises:
        FrameDiscontinuityError: If the re-seeded frame also degenerates
    """
    if sol.is_constant:
        return 0.0
    ctx = log_operation(logger, "gcr_residual", solution=sol.name, pt=complex(pt))
    pivots = complete_frame(sol, pt, tolerances=tolerances).pivots
    try:
        value = _gcr(sol, pt, pivots, tolerances)
    except FrameDiscontinuityError as e:
        logger.warning("Re-seeding frame for GCR stencil", pt=complex(pt), error=e.message)
        shifted = complex(pt) + 0.5 * tolerances.gcr_step * (1 + 1j)
        pivots = complete_frame(sol, shifted, tolerances=tolerances).pivots
        value = _gcr(sol, pt, pivots, tolerances)
    log_operation_complete(logger, ctx, True, value=value, pivots=list(pivots))
    return value


# -- explicit ℂP² frame ----------------------------------------------------------


def _elementary(i: int, j: int) -> CMatrix:
    e = np.zeros((3, 3), dtype=np.complex128)
    e[i, j] = 1.0
    return e


Y_MINUS = _elementary(1, 0)
Y_PLUS = -_elementary(0, 1)


def _phi(sol: CpnSolution, pt: complex) -> tuple[CMatrix, float]:
    jet = sol.jets.field(pt)
    f, df = jet.f, jet.d
    norm = float(np.linalg.norm(f))
    Pdf = df - f * np.vdot(f, df) / norm**2
    q = float(np.real(np.vdot(Pdf, Pdf))) / norm**2
    if q < DEFAULT_TOLERANCES.degenerate_metric:
        raise DegenerateMetricError("Conformal factor vanishes", pt=complex(pt), q=q)
    r0 = np.conj(f) / norm
    r1 = 1j * np.conj(Pdf) / (norm * np.sqrt(q))
    r2 = np.conj(np.cross(r0, r1))
    return np.array([r0, r1, r2], dtype=np.complex128), q


def cp2_frame(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Cp2Frame:
    """Φ ∈ SU(3) with ∂X = √q Φ†Y₋Φ, ∂̄X = √q Φ†Y₊Φ, and its normal frame.

    Normals are Φ†SⱼΦ for the six basis elements other than S₅ and S₇ (S₄
    scaled to unit length).

    Raises:
        DimensionError: Unless n = 2
        NotASolutionError: If sol is not holomorphic
        DegenerateMetricError: Where q vanishes
    """
    if sol.n != 2:
        raise DimensionError("The explicit frame needs the CP2 model", n=sol.n)
    if not sol.is_holomorphic:
        raise NotASolutionError("The explicit frame needs a holomorphic solution", kind=sol.kind.value)
    require_safe(sol, pt, "cp2_frame")
    Phi, _ = _phi(sol, pt)
    basis = su_basis(3)
    scale = np.sqrt(np.diag(basis.gram))
    normals = tuple(
        SuElement(_skew(dagger(Phi) @ (basis[j].mat / scale[j]) @ Phi)) for j in CP2_NORMAL_INDICES
    )
    t = tangents(sol, pt)
    frame = FrameState(pt=complex(pt), tangents=(t.dX, t.dbX), normals=normals)
    return Cp2Frame(Phi=Phi, frame=frame)


def cp2_tangent_residual(sol: CpnSolution, pt: complex) -> float:
    """max(|√q Φ†Y₋Φ − i𝕂†|, |√q Φ†Y₊Φ − i𝕂|)."""
    Phi, q = _phi(sol, pt)
    t = tangents(sol, pt)
    root = np.sqrt(q)
    lhs = root * dagger(Phi) @ Y_MINUS @ Phi
    rhs = root * dagger(Phi) @ Y_PLUS @ Phi
    return max(float(np.max(np.abs(lhs - t.dX))), float(np.max(np.abs(rhs - t.dbX))))


def frame_report(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> dict[str, Any]:
    """Frame, A, B and residuals at pt as a JSON-ready dict."""
    ctx = log_operation(logger, "frame_report", solution=sol.name, pt=complex(pt))
    frame = complete_frame(sol, pt, tolerances=tolerances)
    gw = gauss_weingarten(sol, pt, frame, tolerances)
    report: dict[str, Any] = {
        "solution": sol.name,
        "pt": complex(pt),
        "frame": frame.to_dict(),
        "A": gw.A,
        "B": gw.B,
        "antisymmetry": gw.normal_antisymmetry,
        "gw_defining_residual": gw_defining_residual(sol, pt, frame, tolerances),
        "gcr_residual": gcr_residual(sol, pt, tolerances),
    }
    if sol.n == 2 and sol.is_holomorphic:
        explicit = cp2_frame(sol, pt, tolerances)
        report["Phi"] = explicit.Phi
        report["Phi_unitarity"] = float(
            np.max(np.abs(dagger(explicit.Phi) @ explicit.Phi - np.eye(3)))
        )
        report["Phi_det"] = complex(np.linalg.det(explicit.Phi))
        report["Phi_tangent_residual"] = cp2_tangent_residual(sol, pt)
        report["Phi_frame_residual"] = explicit.frame.residual()
    log_operation_complete(logger, ctx, True)
    return report


__all__ = [
    "CP2_NORMAL_INDICES",
    "Cp2Frame",
    "FrameState",
    "GWMatrices",
    "RANK_TOLERANCE",
    "Y_MINUS",
    "Y_PLUS",
    "complete_frame",
    "cp2_frame",
    "cp2_tangent_residual",
    "frame_report",
    "gauss_weingarten",
    "gcr_residual",
    "gw_defining_residual",
]
