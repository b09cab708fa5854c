"""Induced metric, fundamental forms and curvatures of the immersed surface.

All inner products are (X, Y) = -½ tr(XY), extended bilinearly to complex
combinations of tangents. With ∂X = i𝕂† and ∂̄X = i𝕂 the complex metric is
g_ξξ = -J, g_ξξ̄ = ½(q + q̃), g_ξ̄ξ̄ = conj(g_ξξ).
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, NamedTuple

import numpy as np
import structlog
import sympy as sp
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigError, DegenerateMetricError, NotASolutionError
from .immersion import ParameterGrid
from .linalg import CMatrix, SuElement, bilinear, dagger
from .logging_config import log_operation, log_operation_complete
from .model import (
    CpnSolution,
    ScalarJet,
    density_field,
    invert_chart,
    j_scalars,
    require_safe,
)
from .numerics import QuadratureResult, disk_quadrature, sphere_quadrature
from .settings import DEFAULT_TOLERANCES, Tolerances
from .utils import parallel_map

logger = structlog.get_logger()

CURVATURE_METHODS = ("auto", "conformal", "brioschi", "hopf", "gauss")

CURVATURE_HEADER = ("re_xi", "im_xi", "J_re", "J_im", "q", "det_g", "K", "H")

# dξdξ̄ → 8 dx dy in the action and charge integrals
COMPLEX_MEASURE = 8.0


@dataclass(frozen=True)
class MetricSample:
    """Complex and real components of the induced metric at one point.

    ``det_g`` is the real-form determinant g11·g22 − g12² (four times minus
    the complex determinant g_ξξ·g_ξ̄ξ̄ − g_ξξ̄²).
    """

    pt: complex
    g_xx: complex
    g_xbx: float
    g_bxbx: complex
    g11: float
    g12: float
    g22: float
    det_g: float
    q: float
    q_tilde: float
    degenerate: bool
    consistency: float

    @property
    def J(self) -> complex:
        return -self.g_xx

    @property
    def det_complex(self) -> float:
        return float(np.real(self.g_xx * self.g_bxbx) - self.g_xbx**2)

    @property
    def gram(self) -> NDArray[np.complex128]:
        """[[g_ξξ, g_ξξ̄], [g_ξξ̄, g_ξ̄ξ̄]]."""
        return np.array(
            [[self.g_xx, self.g_xbx], [self.g_xbx, self.g_bxbx]], dtype=np.complex128
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "pt": self.pt,
            "g_xx": self.g_xx,
            "g_xbx": self.g_xbx,
            "g_bxbx": self.g_bxbx,
            "g11": self.g11,
            "g12": self.g12,
            "g22": self.g22,
            "det_g": self.det_g,
            "q": self.q,
            "q_tilde": self.q_tilde,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class CurvatureSample:
    pt: complex
    K: float
    H_vec: SuElement
    H_norm: float
    normal_residual: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "pt": self.pt,
            "K": self.K,
            "H_norm": self.H_norm,
            "H_vec": self.H_vec.mat,
            "normal_residual": self.normal_residual,
        }


class SecondForm(NamedTuple):
    """Normal parts of ∂²X, ∂∂̄X and ∂̄²X (coefficients of dξ², dξdξ̄, dξ̄²)."""

    xx: CMatrix
    xxb: CMatrix
    bxbx: CMatrix
    a: NDArray[np.complex128]
    normal_residual: float


class Tangents(NamedTuple):
    """∂X, ∂̄X and their second derivatives at a point."""

    dX: CMatrix
    dbX: CMatrix
    ddX: CMatrix
    ddbX: CMatrix
    dbdbX: CMatrix


class PolarForms(NamedTuple):
    """I (scalars) and II (normal vectors) in the polar chart ξ = r e^{iφ}."""

    I_rr: float
    I_rphi: float
    I_phiphi: float
    II_rr: CMatrix
    II_rphi: CMatrix
    II_phiphi: CMatrix


class RevolutionGeometry(NamedTuple):
    E: float
    G: float
    L: float
    N: float
    K: float
    H: float


def tangents(sol: CpnSolution, pt: complex) -> Tangents:
    """∂X = i𝕂†, ∂̄X = i𝕂, ∂²X = i(∂̄𝕂)†, ∂∂̄X = i∂𝕂, ∂̄²X = i∂̄𝕂."""
    require_safe(sol, pt, "tangents")
    K, dK, dbK = sol.jets.k(pt)
    return Tangents(
        dX=1j * dagger(K),
        dbX=1j * K,
        ddX=1j * dagger(dbK),
        ddbX=1j * dK,
        dbdbX=1j * dbK,
    )


def _real_form(g_xx: complex, g_xbx: float) -> tuple[float, float, float]:
    g11 = 2 * g_xbx + 2 * g_xx.real
    g22 = 2 * g_xbx - 2 * g_xx.real
    g12 = -2 * g_xx.imag
    return g11, g12, g22


def metric(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> MetricSample:
    """Induced metric at pt.

    Complex components come from :func:`j_scalars`; the real components are
    computed from the tangent matrices and ``consistency`` records the largest
    disagreement between the two.

    Note:
        g_xbx = ½(q + q̃), so W = ξ gives g_xbx = 0.5 at ξ = 0 and
        ds² = 2 g_xbx |dξ|² = |dξ|² there. Callers wanting the conformal
        factor of ds² = λ|dξ|² use λ = 2 g_xbx = q + q̃.

    Raises:
        SingularPointError: If pt is not safe
    """
    s = j_scalars(sol, pt)
    g_xx = -s.J
    g_xbx = 0.5 * (s.q + s.q_tilde)
    g11, g12, g22 = _real_form(g_xx, g_xbx)

    t = tangents(sol, pt)
    dx = t.dX + t.dbX
    dy = 1j * (t.dX - t.dbX)
    from_tangents = (
        bilinear(dx, dx).real,
        bilinear(dx, dy).real,
        bilinear(dy, dy).real,
    )
    consistency = max(abs(a - b) for a, b in zip((g11, g12, g22), from_tangents, strict=True))

    det_g = g11 * g22 - g12**2
    return MetricSample(
        pt=complex(pt),
        g_xx=g_xx,
        g_xbx=g_xbx,
        g_bxbx=g_xx.conjugate(),
        g11=g11,
        g12=g12,
        g22=g22,
        det_g=det_g,
        q=s.q,
        q_tilde=s.q_tilde,
        degenerate=det_g < tolerances.degenerate_metric,
        consistency=consistency,
    )


def _require_nondegenerate(g: MetricSample, tolerances: Tolerances) -> None:
    if g.degenerate:
        raise DegenerateMetricError(
            "Induced metric is degenerate",
            pt=g.pt,
            det_g=g.det_g,
            tolerance=tolerances.degenerate_metric,
        )


def _require_solution(sol: CpnSolution, what: str) -> None:
    if not sol.is_solution:
        raise NotASolutionError(
            "Field fails the Euler-Lagrange check", during=what, residual=sol.validation
        )


# -- Gaussian curvature ----------------------------------------------------------


def _combo(*terms: tuple[complex, ScalarJet]) -> ScalarJet:
    coefs = [c for c, _ in terms]
    jets = [j for _, j in terms]
    return ScalarJet(
        *(sum(c * comp for c, comp in zip(coefs, comps, strict=True)) for comps in zip(*jets))
    )


def _xy_partials(j: ScalarJet) -> dict[str, float]:
    return {
        "x": float(np.real(j.d + j.db)),
        "y": float(np.real(1j * (j.d - j.db))),
        "xx": float(np.real(j.dd + 2 * j.ddb + j.dbdb)),
        "yy": float(np.real(-(j.dd - 2 * j.ddb + j.dbdb))),
        "xy": float(np.real(1j * (j.dd - j.dbdb))),
        "s": float(np.real(j.s)),
    }


def _conformal_curvature(sigma: ScalarJet) -> float:
    s = float(np.real(sigma.s))
    ddb_log = np.real(sigma.ddb) / s - abs(sigma.d) ** 2 / s**2
    return float(-2.0 / s * ddb_log)


def _brioschi_curvature(J: ScalarJet, sigma: ScalarJet) -> float:
    Jb = J.conj()
    E = _xy_partials(_combo((1, sigma), (-1, J), (-1, Jb)))
    G = _xy_partials(_combo((1, sigma), (1, J), (1, Jb)))
    F = _xy_partials(_combo((-1j, J), (1j, Jb)))
    m1 = np.array(
        [
            [
                -0.5 * E["yy"] + F["xy"] - 0.5 * G["xx"],
                0.5 * E["x"],
                F["x"] - 0.5 * E["y"],
            ],
            [F["y"] - 0.5 * G["x"], E["s"], F["s"]],
            [0.5 * G["y"], F["s"], G["s"]],
        ]
    )
    m2 = np.array(
        [
            [0.0, 0.5 * E["y"], 0.5 * G["x"]],
            [0.5 * E["y"], E["s"], F["s"]],
            [0.5 * G["x"], F["s"], G["s"]],
        ]
    )
    det = E["s"] * G["s"] - F["s"] ** 2
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / det**2)


def _hopf_curvature(J: ScalarJet, sigma: ScalarJet) -> float:
    gxx = _combo((-1, J))
    gb = _combo((0.5, sigma))
    g = abs(gxx.s) ** 2 - gb.s**2
    dbar_g = gxx.db * np.conj(gxx.s) + gxx.s * np.conj(gxx.d) - 2 * gb.s * gb.db
    U = -2 * gb.d + gb.s * gxx.d / gxx.s
    dbar_U = (
        -2 * gb.ddb
        + gb.db * gxx.d / gxx.s
        + gb.s * gxx.ddb / gxx.s
        - gb.s * gxx.d * gxx.db / gxx.s**2
    )
    # the bracket is −K for holomorphic J
    return float(-np.real(dbar_U / (2 * g) - U * dbar_g / (4 * g**2)))


def curvature_from_jets(J: ScalarJet, sigma: ScalarJet, method: str) -> float:
    """K of the metric g_ξξ = −J, g_ξξ̄ = ½σ from its second-order jets.

    ``method`` is ``conformal`` (ignores J), ``brioschi`` or ``hopf`` (J must
    be holomorphic and nonzero).

    Raises:
        ConfigError: For any other method
    """
    if method == "conformal":
        return _conformal_curvature(sigma)
    if method == "brioschi":
        return _brioschi_curvature(J, sigma)
    if method == "hopf":
        return _hopf_curvature(J, sigma)
    raise ConfigError("Method does not work on metric jets", method=method)


def gaussian_curvature(
    sol: CpnSolution,
    pt: complex,
    method: str = "auto",
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Gaussian curvature with exact second derivatives of the metric.

    ``auto`` uses K = −(2/λ)∂∂̄ ln λ with λ = q + q̃ when |J| is below the
    conformal tolerance and Brioschi's formula otherwise. ``hopf`` and
    ``gauss`` are cross-checks.

    Raises:
        ConfigError: For an unknown method
        DegenerateMetricError: If det g is below threshold, or for ``hopf``
            when J vanishes
    """
    if method not in CURVATURE_METHODS:
        raise ConfigError("Unknown curvature method", method=method, known=list(CURVATURE_METHODS))
    g = metric(sol, pt, tolerances)
    _require_nondegenerate(g, tolerances)

    if method == "gauss":
        return gauss_equation_curvature(sol, pt, tolerances)

    J, sigma = sol.jets.metric_jets(pt)
    conformal = abs(g.J) < tolerances.conformal
    if method == "hopf":
        if conformal:
            raise DegenerateMetricError(
                "Hopf route needs a nonvanishing Hopf differential",
                pt=complex(pt),
                J=g.J,
                tolerance=tolerances.conformal,
            )
        return curvature_from_jets(J, sigma, "hopf")
    if method == "conformal" or (method == "auto" and conformal):
        return curvature_from_jets(J, sigma, "conformal")
    return curvature_from_jets(J, sigma, "brioschi")


# -- second fundamental form and mean curvature -----------------------------------


def _normal_residual(vectors: Sequence[CMatrix], t: Tangents) -> float:
    scale = max(1.0, float(np.max(np.abs(t.dX))) ** 2)
    worst = 0.0
    for v in vectors:
        for tangent in (t.dX, t.dbX):
            worst = max(worst, abs(bilinear(v, tangent)))
    return worst / scale


def second_fundamental_form(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> SecondForm:
    """(∂²X − a₁₁∂X − a₁₂∂̄X, ∂∂̄X, ∂̄²X − a₂₁∂X − a₂₂∂̄X).

    aᵢⱼ solve the Gram system of the tangents so that each coefficient is
    normal to the surface.

    Raises:
        NotASolutionError: If sol fails the Euler-Lagrange check
        DegenerateMetricError: If det g is below threshold
    """
    _require_solution(sol, "second_fundamental_form")
    g = metric(sol, pt, tolerances)
    _require_nondegenerate(g, tolerances)
    t = tangents(sol, pt)

    gram = np.array(
        [
            [bilinear(t.dX, t.dX), bilinear(t.dX, t.dbX)],
            [bilinear(t.dbX, t.dX), bilinear(t.dbX, t.dbX)],
        ]
    )
    rhs = np.array(
        [
            [bilinear(t.ddX, t.dX), bilinear(t.ddX, t.dbX)],
            [bilinear(t.dbdbX, t.dX), bilinear(t.dbdbX, t.dbX)],
        ]
    )
    a = np.linalg.solve(gram, rhs.T).T
    xx = t.ddX - a[0, 0] * t.dX - a[0, 1] * t.dbX
    bxbx = t.dbdbX - a[1, 0] * t.dX - a[1, 1] * t.dbX
    xxb = t.ddbX
    return SecondForm(
        xx=xx,
        xxb=xxb,
        bxbx=bxbx,
        a=a,
        normal_residual=_normal_residual((xx, xxb, bxbx), t),
    )


def _skew_traceless(mat: CMatrix) -> CMatrix:
    skew = 0.5 * (mat - dagger(mat))
    return skew - np.trace(skew) / skew.shape[0] * np.eye(skew.shape[0])


def mean_curvature(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> CurvatureSample:
    """H⃗ = ½(g_ξ̄ξ̄ II_ξξ − 2g_ξξ̄ II_ξξ̄ + g_ξξ II_ξ̄ξ̄)/(g_ξξ g_ξ̄ξ̄ − g_ξξ̄²).

    Raises:
        NotASolutionError: If sol fails the Euler-Lagrange check
        DegenerateMetricError: If det g is below threshold
    """
    g = metric(sol, pt, tolerances)
    II = second_fundamental_form(sol, pt, tolerances)
    raw = 0.5 * (g.g_bxbx * II.xx - 2 * g.g_xbx * II.xxb + g.g_xx * II.bxbx) / g.det_complex
    H_vec = SuElement(_skew_traceless(raw))
    H_norm = float(np.sqrt(max(bilinear(H_vec.mat, H_vec.mat).real, 0.0)))
    t = tangents(sol, pt)
    return CurvatureSample(
        pt=complex(pt),
        K=gaussian_curvature(sol, pt, tolerances=tolerances),
        H_vec=H_vec,
        H_norm=H_norm,
        normal_residual=_normal_residual((H_vec.mat,), t),
    )


def signed_mean_curvature(sample: CurvatureSample, normal: SuElement) -> float:
    """Component of H⃗ along a normal direction (normalised)."""
    length = np.sqrt(bilinear(normal.mat, normal.mat).real)
    return float(bilinear(sample.H_vec.mat, normal.mat).real / length)


def gauss_equation_curvature(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """K = [(II₁₁, II₂₂) − (II₁₂, II₁₂)]/det g in real coordinates."""
    g = metric(sol, pt, tolerances)
    _require_nondegenerate(g, tolerances)
    II = second_fundamental_form(sol, pt, tolerances)
    ii11 = II.xx + 2 * II.xxb + II.bxbx
    ii22 = -(II.xx - 2 * II.xxb + II.bxbx)
    ii12 = 1j * (II.xx - II.bxbx)
    num = bilinear(ii11, ii22).real - bilinear(ii12, ii12).real
    return float(num / g.det_g)


def polar_forms(
    sol: CpnSolution, r: float, phi: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> PolarForms:
    """I and II pulled back to (r, φ) with ξ = r e^{iφ}."""
    if r <= 0:
        raise ConfigError("Polar radius must be positive", r=r)
    pt = complex(r * np.exp(1j * phi))
    g = metric(sol, pt, tolerances)
    II = second_fundamental_form(sol, pt, tolerances)
    e = np.exp(1j * phi)
    # ∂_r = e^{iφ}∂ + e^{−iφ}∂̄, ∂_φ = ir(e^{iφ}∂ − e^{−iφ}∂̄)
    I_rr = 2 * np.real(e**2 * g.g_xx) + 2 * g.g_xbx
    I_rphi = -2 * r * np.imag(e**2 * g.g_xx)
    I_phiphi = r**2 * (2 * g.g_xbx - 2 * np.real(e**2 * g.g_xx))
    return PolarForms(
        I_rr=float(I_rr),
        I_rphi=float(I_rphi),
        I_phiphi=float(I_phiphi),
        II_rr=e**2 * II.xx + 2 * II.xxb + np.conj(e) ** 2 * II.bxbx,
        II_rphi=1j * r * (e**2 * II.xx - np.conj(e) ** 2 * II.bxbx),
        II_phiphi=-(r**2) * (e**2 * II.xx - 2 * II.xxb + np.conj(e) ** 2 * II.bxbx),
    )


def vector_norm(mat: CMatrix) -> float:
    """Length of a real tangent or normal vector under -½ tr."""
    return float(np.sqrt(0.5 * np.real(np.trace(mat @ dagger(mat)))))


# -- integrals -----------------------------------------------------------------


def _willmore_density(
    sol: CpnSolution, tolerances: Tolerances
) -> Callable[[complex], float]:
    def density(pt: complex) -> float:
        try:
            g = metric(sol, pt, tolerances)
            if g.degenerate:
                return 0.0
            H = mean_curvature(sol, pt, tolerances).H_norm
        except DegenerateMetricError:
            return 0.0
        return H**2 * np.sqrt(g.det_g)

    return density


def willmore(
    sol: CpnSolution,
    region: tuple[float, float] | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    threads: int = 1,
) -> QuadratureResult:
    """∫|H⃗|² dA over the sphere, or over the annulus ``region = (r_min, r_max)``.

    Raises:
        NotASolutionError: If sol fails the Euler-Lagrange check
        QuadratureError: If refinement does not converge
    """
    _require_solution(sol, "willmore")
    ctx = log_operation(logger, "willmore", solution=sol.name, region=region)
    if sol.is_constant:
        result = QuadratureResult(value=0.0, error=0.0, levels=0)
    elif region is None:
        result = sphere_quadrature(
            _willmore_density(sol, tolerances),
            tol=tolerances.sphere_quadrature,
            vectorized=False,
            threads=threads,
            outer_density=_willmore_density(invert_chart(sol), tolerances),
        )
    else:
        result = disk_quadrature(
            _willmore_density(sol, tolerances),
            region[0],
            region[1],
            tol=tolerances.sphere_quadrature,
            vectorized=False,
            threads=threads,
        )
    log_operation_complete(logger, ctx, True, value=result.value, error=result.error)
    return result


def _sphere_integral(
    sol: CpnSolution, which: str, tolerances: Tolerances
) -> QuadratureResult:
    if sol.is_constant:
        return QuadratureResult(value=0.0, error=0.0, levels=0)
    return sphere_quadrature(
        density_field(sol, which),
        tol=tolerances.sphere_quadrature,
        outer_density=density_field(invert_chart(sol), which),
    )


def topological_charge(
    sol: CpnSolution, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> QuadratureResult:
    """Q = (1/π)∫(q − q̃) dx dy over both charts of the sphere.

    Positive for holomorphic fields; the value is not rounded.
    """
    ctx = log_operation(logger, "topological_charge", solution=sol.name)
    result = _sphere_integral(sol, "charge", tolerances)
    log_operation_complete(
        logger, ctx, True, value=result.value, gap=abs(result.value - round(result.value))
    )
    return result


def total_action(
    sol: CpnSolution, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> QuadratureResult:
    """S = ∫ ¼(q + q̃) dξdξ̄ with dξdξ̄ → 8 dx dy."""
    ctx = log_operation(logger, "total_action", solution=sol.name)
    raw = _sphere_integral(sol, "action", tolerances)
    result = QuadratureResult(
        value=COMPLEX_MEASURE * raw.value,
        error=COMPLEX_MEASURE * raw.error,
        levels=raw.levels,
        history=[COMPLEX_MEASURE * v for v in raw.history],
    )
    log_operation_complete(logger, ctx, True, value=result.value)
    return result


# -- published closed forms ------------------------------------------------------


def example1_metric_published(a: ArrayLike, xi: ArrayLike) -> NDArray[np.float64]:
    """(a² + 4|ξ|² + a²|ξ|⁴)/(1 + a²|ξ|² + |ξ|⁴)², the conformal factor q."""
    a2 = np.asarray(a, dtype=np.float64) ** 2
    t = np.abs(np.asarray(xi, dtype=np.complex128)) ** 2
    return (a2 + 4 * t + a2 * t**2) / (1 + a2 * t + t**2) ** 2


def example1_curvature_published(a: ArrayLike, xi: ArrayLike) -> NDArray[np.float64]:
    """−4 + 8a²(1 + a²|ξ|² + |ξ|⁴)³/(a² + 4|ξ|² + a²|ξ|⁴)³ as printed."""
    a2 = np.asarray(a, dtype=np.float64) ** 2
    t = np.abs(np.asarray(xi, dtype=np.complex128)) ** 2
    return -4 + 8 * a2 * (1 + a2 * t + t**2) ** 3 / (a2 + 4 * t + a2 * t**2) ** 3


def example3_forms_published(r: ArrayLike) -> dict[str, NDArray[np.float64]]:
    """Printed I and II of the surface of revolution (dr², dφ² coefficients)."""
    r = np.asarray(r, dtype=np.float64)
    r2 = r**2
    p = r2**2 + 6 * r2 + 1
    return {
        "I_rr": p / (r2**2 * (1 + r2) ** 2),
        "I_phiphi": (r2 - 1) ** 2 / (r2 * (1 + r2) ** 2),
        "II_rr": 4 * (r2 + 3) / ((1 + r2) ** 2 * np.sqrt(p)),
        "II_phiphi": 4 * r2 * (r2 - 1) / ((1 + r2) ** 2 * np.sqrt(p)),
    }


def example3_curvatures_published(r: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Printed (K, H) of the surface of revolution."""
    r = np.asarray(r, dtype=np.float64)
    r2 = r**2
    p = r2**2 + 6 * r2 + 1
    K = 16 * r2**4 * (r2 + 3) / (p**2 * (r2 - 1))
    H = r2**2 * (r2**2 + 4 * r2 - 1) / (p**1.5 * (r2 - 1))
    return K, H


@lru_cache(maxsize=1)
def _revolution_fn() -> Callable[..., Any]:
    r = sp.Symbol("r", positive=True)
    rho = (r**2 - 1) / (r * (r**2 + 1))
    z = 2 / (r**2 + 1)
    d_rho, d_z = sp.diff(rho, r), sp.diff(z, r)
    E = d_rho**2 + d_z**2
    G = rho**2
    L = (d_rho * sp.diff(z, r, 2) - sp.diff(rho, r, 2) * d_z) / sp.sqrt(E)
    N = rho * d_z / sp.sqrt(E)
    K = L * N / (E * G)
    H = (L * G + N * E) / (2 * E * G)
    return sp.lambdify(r, [E, G, L, N, K, H], modules="numpy", cse=True)


def revolution_geometry(r: float) -> RevolutionGeometry:
    """E, G, L, N, K and H of the printed surface of revolution at radius r.

    Profile ρ = (r² − 1)/(r(r² + 1)), z = 2/(r² + 1) rotated about the z axis.

    Raises:
        ConfigError: If r ≤ 0 or r = 1
    """
    if r <= 0 or r == 1:
        raise ConfigError("Revolution geometry needs r > 0 and r != 1", r=r)
    return RevolutionGeometry(*(float(v) for v in _revolution_fn()(float(r))))


# -- tables --------------------------------------------------------------------


def curvature_row(
    sol: CpnSolution, pt: complex, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> list[float]:
    """One CURVATURE_HEADER row; K and H are NaN where the metric degenerates."""
    g = metric(sol, pt, tolerances)
    K = H = float("nan")
    if not g.degenerate:
        try:
            K = gaussian_curvature(sol, pt, tolerances=tolerances)
            if sol.is_solution:
                H = mean_curvature(sol, pt, tolerances).H_norm
        except DegenerateMetricError as e:
            logger.debug("Degenerate point in curvature table", pt=complex(pt), error=e.message)
    return [pt.real, pt.imag, g.J.real, g.J.imag, g.q, g.det_g, K, H]


def curvature_table(
    sol: CpnSolution,
    grid: ParameterGrid,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    threads: int = 1,
) -> list[list[float]]:
    """Rows of CURVATURE_HEADER for every grid vertex, in grid order."""
    ctx = log_operation(logger, "curvature_table", solution=sol.name, vertices=len(grid))
    points = [complex(p) for p in grid.points]
    rows = parallel_map(lambda pt: curvature_row(sol, pt, tolerances), points, threads)
    log_operation_complete(logger, ctx, True)
    return rows


__all__ = [
    "COMPLEX_MEASURE",
    "CURVATURE_HEADER",
    "CURVATURE_METHODS",
    "CurvatureSample",
    "MetricSample",
    "PolarForms",
    "RevolutionGeometry",
    "SecondForm",
    "Tangents",
    "curvature_from_jets",
    "curvature_row",
    "curvature_table",
    "example1_curvature_published",
    "example1_metric_published",
    "example3_curvatures_published",
    "example3_forms_published",
    "gauss_equation_curvature",
    "gaussian_curvature",
    "mean_curvature",
    "metric",
    "polar_forms",
    "revolution_geometry",
    "second_fundamental_form",
    "signed_mean_curvature",
    "tangents",
    "topological_charge",
    "total_action",
    "vector_norm",
    "willmore",
]
