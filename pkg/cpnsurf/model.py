"""ℂPᴺ sigma-model solutions and the analytic objects built from them.

A solution is held in homogeneous form: a ℂ^{N+1}-valued field f(ξ, ξ̄) whose
components are polynomials whenever the input allows it. The projector P,
the matrix 𝕂 = [∂̄P, P], the scalars J, q, q̃ and the residuals of the
Euler–Lagrange equations are evaluated numerically from exact symbolic
derivatives of f.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, NamedTuple

import numpy as np
import structlog
import sympy as sp
from numpy.typing import ArrayLike, NDArray

from .errors import (
    ConfigError,
    DegenerateGeneratorsError,
    DimensionError,
    LieAlgebraError,
    SingularPointError,
)
from .linalg import CMatrix, dagger
from .numerics import (
    XI,
    XIB,
    FieldExpr,
    FieldVector,
    RationalFn,
    SingularityRegistry,
    lambdify_xi,
    swap,
)
from .numerics.fields import EXCLUSION_RADIUS

logger = structlog.get_logger()

SOLUTION_TOLERANCE = 1e-8
VALIDATION_POINTS = 50
VALIDATION_SEED = 20240611
MIN_NORM = 1e-10


class SolutionKind(str, Enum):
    HOLOMORPHIC = "holomorphic"
    ANTIHOLOMORPHIC = "antiholomorphic"
    MIXED = "mixed"
    FIELDS = "fields"


@dataclass(frozen=True)
class ProjectorSample:
    pt: complex
    P: CMatrix


@dataclass(frozen=True)
class KSample:
    pt: complex
    K: CMatrix


class JScalars(NamedTuple):
    """J, J̄, q at a point, plus q̃ and the round-off imaginary part of q."""

    J: complex
    Jbar: complex
    q: float
    q_tilde: float
    q_imag: float


class FieldJets(NamedTuple):
    f: NDArray[np.complex128]
    d: NDArray[np.complex128]
    db: NDArray[np.complex128]
    dd: NDArray[np.complex128]
    ddb: NDArray[np.complex128]
    dbdb: NDArray[np.complex128]


class ScalarJet(NamedTuple):
    """s, ∂s, ∂̄s, ∂²s, ∂∂̄s, ∂̄²s."""

    s: Any
    d: Any
    db: Any
    dd: Any
    ddb: Any
    dbdb: Any

    def conj(self) -> ScalarJet:
        """Jet of the complex conjugate field."""
        c = np.conj
        return ScalarJet(c(self.s), c(self.db), c(self.d), c(self.dbdb), c(self.ddb), c(self.dd))


def _scalar_jet(expr: sp.Expr) -> list[sp.Expr]:
    d1 = sp.diff(expr, XI)
    db1 = sp.diff(expr, XIB)
    return [expr, d1, db1, sp.diff(d1, XI), sp.diff(d1, XIB), sp.diff(db1, XIB)]


def _broadcast(values: Sequence[Any], shape: tuple[int, ...]) -> list[Any]:
    out = []
    for v in values:
        arr = np.asarray(v, dtype=np.complex128)
        out.append(complex(arr) if not shape else np.broadcast_to(arr, shape).copy())
    return out


class SolutionJets:
    """Lambdified derivatives of one homogeneous field f.

    Built once per field (see :func:`jets_for`); every numeric routine of the
    model and geometry modules reads from here.
    """

    def __init__(self, components: tuple[FieldExpr, ...]):
        self.components = components
        self.F = sp.Matrix([c.expr for c in components])
        self.Fc = self.F.applyfunc(lambda e: swap(sp.conjugate(e)))

    @cached_property
    def _f_fn(self) -> Callable[..., Any]:
        F = self.F
        dF = F.diff(XI)
        dbF = F.diff(XIB)
        return lambdify_xi([F, dF, dbF, dF.diff(XI), dF.diff(XIB), dbF.diff(XIB)])

    def field(self, pt: complex) -> FieldJets:
        z = complex(pt)
        parts = self._f_fn(z, z.conjugate())
        return FieldJets(
            *(np.asarray(p, dtype=np.complex128).ravel() for p in parts)
        )

    @cached_property
    def norm2(self) -> sp.Expr:
        return (self.Fc.T * self.F)[0, 0]

    @cached_property
    def K_expr(self) -> sp.Matrix:
        """Symbolic 𝕂 from the explicit f-formula."""
        F, Fc, N = self.F, self.Fc, self.norm2
        fdag = Fc.T
        dbar_fdag = Fc.T.diff(XIB)
        dbF = F.diff(XIB)
        scalar = (dbar_fdag * F)[0, 0] - (fdag * dbF)[0, 0]
        return (dbF * fdag - F * dbar_fdag) / N + F * fdag * scalar / N**2

    @cached_property
    def _k_fn(self) -> Callable[..., Any]:
        K = self.K_expr
        return lambdify_xi([K, K.diff(XI), K.diff(XIB)])

    def k(self, pt: complex) -> tuple[CMatrix, CMatrix, CMatrix]:
        """(𝕂, ∂𝕂, ∂̄𝕂) at pt."""
        z = complex(pt)
        dim = self.F.shape[0]
        parts = self._k_fn(z, z.conjugate())
        return tuple(  # type: ignore[return-value]
            np.broadcast_to(np.asarray(p, dtype=np.complex128), (dim, dim)).copy()
            for p in parts
        )

    @cached_property
    def scalar_exprs(self) -> dict[str, sp.Expr]:
        """J, q and q̃ as exact expressions."""
        F, Fc, N = self.F, self.Fc, self.norm2
        dF, dbF = F.diff(XI), F.diff(XIB)
        # (∂f)† = ∂̄(f†) and (∂̄f)† = ∂(f†)
        dF_dag = Fc.T.diff(XIB)
        dbF_dag = Fc.T.diff(XI)
        fdag = Fc.T
        q = (dF_dag * dF)[0, 0] / N - (fdag * dF)[0, 0] * (dF_dag * F)[0, 0] / N**2
        qt = (dbF_dag * dbF)[0, 0] / N - (fdag * dbF)[0, 0] * (dbF_dag * F)[0, 0] / N**2
        J = (dbF_dag * dF)[0, 0] / N - (dbF_dag * F)[0, 0] * (fdag * dF)[0, 0] / N**2
        return {"J": J, "q": q, "q_tilde": qt}

    @cached_property
    def _jet_fn(self) -> Callable[..., Any]:
        exprs = self.scalar_exprs
        sigma = exprs["q"] + exprs["q_tilde"]
        return lambdify_xi(_scalar_jet(exprs["J"]) + _scalar_jet(sigma))

    def metric_jets(self, pt: complex | ArrayLike) -> tuple[ScalarJet, ScalarJet]:
        """Second-order jets of J and σ = q + q̃ (broadcast over arrays)."""
        z = np.asarray(pt, dtype=np.complex128)
        values = _broadcast(self._jet_fn(z, np.conj(z)), z.shape)
        sigma = [np.real(v) if i == 0 else v for i, v in enumerate(values[6:])]
        return ScalarJet(*values[:6]), ScalarJet(*sigma)

    @cached_property
    def _density_fn(self) -> Callable[..., Any]:
        exprs = self.scalar_exprs
        return lambdify_xi([exprs["q"], exprs["q_tilde"]])

    def densities(self, pt: complex | ArrayLike) -> tuple[Any, Any]:
        """(q, q̃) broadcast over an array of points."""
        z = np.asarray(pt, dtype=np.complex128)
        q, qt = _broadcast(self._density_fn(z, np.conj(z)), z.shape)
        return np.real(q), np.real(qt)

    @cached_property
    def affine_exprs(self) -> list[sp.Expr]:
        """Wᵢ = fᵢ/f₀."""
        f0 = self.F[0]
        return [self.F[i] / f0 for i in range(1, self.F.shape[0])]

    @cached_property
    def _affine_fn(self) -> Callable[..., Any]:
        W = sp.Matrix(self.affine_exprs)
        dW, dbW = W.diff(XI), W.diff(XIB)
        return lambdify_xi([W, dW, dbW, dW.diff(XIB)])

    def affine(self, pt: complex) -> tuple[NDArray[np.complex128], ...]:
        """(W, ∂W, ∂̄W, ∂∂̄W) in the chart f₀ ≠ 0."""
        z = complex(pt)
        n = self.F.shape[0] - 1
        parts = self._affine_fn(z, z.conjugate())
        return tuple(
            np.broadcast_to(np.asarray(p, dtype=np.complex128).ravel(), (n,)).copy()
            for p in parts
        )


@lru_cache(maxsize=64)
def jets_for(components: tuple[FieldExpr, ...]) -> SolutionJets:
    """Shared :class:`SolutionJets` for a field (keyed on its exact components)."""
    return SolutionJets(components)


@dataclass(frozen=True, eq=False)
class CpnSolution:
    """A field of the ℂPᴺ model in homogeneous coordinates.

    Non-solutions are allowed for diagnostics; ``is_solution`` records the
    outcome of the Euler–Lagrange check and ``validation`` its worst residual.
    """

    n: int
    f: FieldVector
    kind: SolutionKind
    name: str = ""
    components: tuple[RationalFn, ...] = ()
    generators: tuple[RationalFn, ...] = ()
    is_solution: bool = True
    validation: float = 0.0
    source: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError("Model index must be positive", n=self.n)
        if len(self.f) != self.n + 1:
            raise DimensionError(
                "Field needs N+1 components", n=self.n, components=len(self.f)
            )

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def registry(self) -> SingularityRegistry:
        return self.f.registry

    @property
    def jets(self) -> SolutionJets:
        return jets_for(self.f.components)

    @property
    def is_holomorphic(self) -> bool:
        return self.f.is_holomorphic

    @property
    def is_antiholomorphic(self) -> bool:
        return self.f.is_antiholomorphic

    @property
    def is_constant(self) -> bool:
        return all(not c.expr.free_symbols for c in self.f.components)

    def with_radius(self, radius: float) -> CpnSolution:
        """Same field with another exclusion radius."""
        f = FieldVector(self.f.components, self.f.registry.with_radius(radius))
        return _replace(self, f=f)

    def degrees(self) -> list[tuple[int, int]]:
        """Degrees of each component in ξ and in ξ̄ (-1 if not polynomial)."""
        out = []
        for c in self.f.components:
            try:
                poly = sp.Poly(c.expr, XI, XIB)
                out.append((poly.degree(XI), poly.degree(XIB)))
            except sp.PolynomialError:
                out.append((-1, -1))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "kind": self.kind.value,
            "f": [str(c) for c in self.f.components],
            "degrees": self.degrees(),
            "singular_points": list(self.registry.points),
            "singular_curves": [str(c) for c in self.registry.curves],
            "is_solution": self.is_solution,
            "el_residual_max": self.validation,
        }


def _replace(sol: CpnSolution, **changes: Any) -> CpnSolution:
    values = {
        "n": sol.n,
        "f": sol.f,
        "kind": sol.kind,
        "name": sol.name,
        "components": sol.components,
        "generators": sol.generators,
        "is_solution": sol.is_solution,
        "validation": sol.validation,
        "source": sol.source,
    }
    values.update(changes)
    return CpnSolution(**values)


def _homogenize(exprs: Sequence[sp.Expr]) -> list[sp.Expr]:
    """Clear denominators and strip a common polynomial factor.

    Projective invariance makes both steps harmless.

    Raises:
        ConfigError: If every component vanishes identically
    """
    parts = [sp.fraction(sp.cancel(sp.together(sp.sympify(e)))) for e in exprs]
    common: sp.Expr = sp.Integer(1)
    for _, den in parts:
        if not den.free_symbols:
            continue
        try:
            common = sp.lcm(common, den)
        except sp.PolynomialError:
            common = common * den
    comps = [sp.expand(sp.cancel(num * common / den)) for num, den in parts]

    nonzero = [c for c in comps if c != 0]
    if not nonzero:
        raise ConfigError("All components vanish identically")
    divisor = nonzero[0]
    try:
        for c in nonzero[1:]:
            divisor = sp.gcd(divisor, c)
    except sp.PolynomialError:
        divisor = sp.Integer(1)
    if divisor.free_symbols:
        comps = [sp.expand(sp.cancel(c / divisor)) for c in comps]
    return comps


def _build(
    n: int,
    raw: Sequence[sp.Expr],
    kind: SolutionKind,
    name: str,
    registry_exprs: Sequence[sp.Expr],
    tol: float,
    components: tuple[RationalFn, ...] = (),
    generators: tuple[RationalFn, ...] = (),
    validate: bool = True,
) -> CpnSolution:
    if len(raw) != n + 1:
        raise DimensionError("Expected N+1 components", n=n, components=len(raw))
    homogeneous = _homogenize(raw)
    comps = tuple(FieldExpr(e) for e in homogeneous)
    registry = SingularityRegistry.from_exprs([*registry_exprs, *homogeneous])
    sol = CpnSolution(
        n=n,
        f=FieldVector(comps, registry),
        kind=kind,
        name=name,
        components=components,
        generators=generators,
        source=tuple(str(e) for e in raw),
    )
    if not validate:
        return sol

    worst = validation_residual(sol)
    passed = worst < tol
    if not passed:
        logger.warning(
            "Field fails the Euler-Lagrange check", name=name, kind=kind.value, residual=worst
        )
    logger.debug("Constructed solution", name=name, n=n, kind=kind.value, residual=worst)
    return _replace(sol, is_solution=passed, validation=worst)


def make_holomorphic(
    n: int,
    components: Sequence[RationalFn],
    name: str = "",
    tol: float = SOLUTION_TOLERANCE,
) -> CpnSolution:
    """Holomorphic solution from N+1 rational components f₀..f_N.

    Denominators are cleared and common factors removed, so f is a polynomial
    vector without common zeros.

    Raises:
        DimensionError: If the component count is not N+1
        ConfigError: If all components are zero
    """
    comps = tuple(components)
    if len(comps) != n + 1:
        raise DimensionError("Expected N+1 components", n=n, components=len(comps))
    if all(c.is_zero for c in comps):
        raise ConfigError("All components are zero")
    exprs = [c.expr(XI) for c in comps]
    return _build(n, exprs, SolutionKind.HOLOMORPHIC, name, exprs, tol, components=comps)


def make_antiholomorphic(
    n: int,
    components: Sequence[RationalFn],
    name: str = "",
    tol: float = SOLUTION_TOLERANCE,
) -> CpnSolution:
    """Conjugate of the holomorphic solution with the same components."""
    comps = tuple(components)
    if len(comps) != n + 1:
        raise DimensionError("Expected N+1 components", n=n, components=len(comps))
    if all(c.is_zero for c in comps):
        raise ConfigError("All components are zero")
    exprs = [c.conj_expr() for c in comps]
    return _build(n, exprs, SolutionKind.ANTIHOLOMORPHIC, name, exprs, tol, components=comps)


def wronskians(g: Sequence[RationalFn]) -> dict[tuple[int, int], sp.Expr]:
    """G_ij = gᵢ∂gⱼ − gⱼ∂gᵢ for i < j."""
    exprs = [gi.expr(XI) for gi in g]
    out = {}
    for i in range(len(exprs)):
        for j in range(i + 1, len(exprs)):
            gi, gj = exprs[i], exprs[j]
            out[(i, j)] = sp.cancel(gi * sp.diff(gj, XI) - gj * sp.diff(gi, XI))
    return out


def make_mixed_cp2(
    g: Sequence[RationalFn], name: str = "", tol: float = SOLUTION_TOLERANCE
) -> CpnSolution:
    """Mixed ℂP² solution from three holomorphic generators.

    fᵢ = Σ_{k≠i} ḡ_k G_ki, stored as (f₃, f₁, f₂) so that W₁ = f₁/f₃ and
    W₂ = f₂/f₃.

    Raises:
        DimensionError: Unless exactly three generators are given
        DegenerateGeneratorsError: If a Wronskian vanishes or f ≡ 0
    """
    gens = tuple(g)
    if len(gens) != 3:
        raise DimensionError("Mixed construction needs three generators", count=len(gens))
    upper = wronskians(gens)
    for (i, j), value in upper.items():
        if sp.simplify(value) == 0:
            raise DegenerateGeneratorsError(
                "Generators are proportional", pair=[i + 1, j + 1]
            )

    def G(k: int, i: int) -> sp.Expr:
        return upper[(k, i)] if k < i else -upper[(i, k)]

    conj_g = [gk.conj_expr() for gk in gens]
    f = [
        sp.expand(sp.together(sum((conj_g[k] * G(k, i) for k in range(3) if k != i), sp.Integer(0))))
        for i in range(3)
    ]
    if all(sp.simplify(fi) == 0 for fi in f):
        raise DegenerateGeneratorsError("Wronskian construction gives f = 0")
    ordered = [f[2], f[0], f[1]]
    registry_exprs = [gk.expr(XI) for gk in gens] + conj_g
    return _build(2, ordered, SolutionKind.MIXED, name, registry_exprs, tol, generators=gens)


def from_fields(
    n: int,
    exprs: Sequence[str | sp.Expr | FieldExpr],
    kind: SolutionKind | str = SolutionKind.FIELDS,
    name: str = "",
    tol: float = SOLUTION_TOLERANCE,
) -> CpnSolution:
    """Arbitrary field f(ξ, ξ̄); kept with ``is_solution=False`` if it fails the EL check.

    Denominators of the given expressions stay in the singularity registry
    even after they are cleared from f.
    """
    parsed = [
        e.expr if isinstance(e, FieldExpr)
        else FieldExpr.parse(e).expr if isinstance(e, str)
        else FieldExpr(e).expr
        for e in exprs
    ]
    try:
        kind = SolutionKind(kind)
    except ValueError as e:
        raise ConfigError("Unknown solution kind", kind=str(kind)) from e
    return _build(n, parsed, kind, name, parsed, tol)


def rotate(sol: CpnSolution, U: ArrayLike, tol: float = 1e-10) -> CpnSolution:
    """f → Uf for a constant unitary U.

    Raises:
        LieAlgebraError: If U is not unitary
    """
    mat = np.asarray(U, dtype=np.complex128)
    if mat.shape != (sol.dim, sol.dim):
        raise DimensionError("Rotation has the wrong size", shape=mat.shape, dim=sol.dim)
    defect = float(np.max(np.abs(dagger(mat) @ mat - np.eye(sol.dim))))
    if defect > tol:
        raise LieAlgebraError("Rotation is not unitary", defect=defect)
    rotated = sp.Matrix(mat.tolist()) * sol.f.matrix
    comps = tuple(FieldExpr(sp.expand(e)) for e in rotated)
    return _replace(
        sol,
        f=FieldVector(comps, sol.registry),
        name=f"{sol.name}:rotated" if sol.name else "rotated",
        components=(),
    )


def embed_cp1_in_cp2(W: RationalFn, name: str = "", tol: float = SOLUTION_TOLERANCE) -> CpnSolution:
    """ℂP² solution with W₁ = W₂ = W/√2."""
    half = tuple(c / sp.sqrt(2) for c in W.num)
    scaled = RationalFn(half, W.den)
    return make_holomorphic(2, [RationalFn.constant(1), scaled, scaled], name=name, tol=tol)


def invert_chart(sol: CpnSolution) -> CpnSolution:
    """The same field written in the chart w = 1/ξ.

    Densities of the result on |w| ≤ 1 are the densities of ``sol`` on
    |ξ| ≥ 1 expressed per unit area of w.
    """
    sub = {XI: 1 / XI, XIB: 1 / XIB}
    exprs = [c.expr.xreplace(sub) for c in sol.f.components]
    inverted = _build(
        sol.n,
        exprs,
        sol.kind,
        f"{sol.name}:inverted",
        exprs,
        SOLUTION_TOLERANCE,
        validate=False,
    )
    return _replace(inverted, is_solution=sol.is_solution, validation=sol.validation)


# -- point safety --------------------------------------------------------------


def is_safe(sol: CpnSolution, pt: complex) -> bool:
    """Outside the exclusion radius of every singularity and |f| > 1e-10."""
    if not sol.registry.is_safe(pt):
        return False
    return float(np.linalg.norm(sol.f(pt))) > MIN_NORM


def require_safe(sol: CpnSolution, pt: complex, what: str = "evaluation") -> None:
    """Raise SingularPointError unless pt is safe for sol."""
    sol.registry.require_safe(pt, what=what)
    norm = float(np.linalg.norm(sol.f(pt)))
    if not np.isfinite(norm) or norm <= MIN_NORM:
        raise SingularPointError("Field vanishes at point", pt=complex(pt), norm=norm, during=what)


def sample_safe_points(
    sol: CpnSolution,
    count: int,
    rng: np.random.Generator | None = None,
    radius: float = 2.0,
    max_tries: int = 10_000,
) -> list[complex]:
    """Uniform random safe points in the disk |ξ| < radius.

    Raises:
        SingularPointError: If too few safe points are found
    """
    rng = rng if rng is not None else np.random.default_rng(VALIDATION_SEED)
    points: list[complex] = []
    for _ in range(max_tries):
        if len(points) == count:
            return points
        r = radius * np.sqrt(rng.uniform())
        pt = complex(r * np.exp(2j * np.pi * rng.uniform()))
        if is_safe(sol, pt):
            points.append(pt)
    if len(points) == count:
        return points
    raise SingularPointError(
        "Could not find enough safe sample points", found=len(points), wanted=count
    )


def default_base_point(sol: CpnSolution, steps: int = 2000) -> complex:
    """ξ₀ = 0 when safe, else the first safe point on a fixed outward spiral."""
    golden = np.pi * (3.0 - np.sqrt(5.0))
    for k in range(steps):
        pt = complex(0.01 * k * np.exp(1j * golden * k))
        if is_safe(sol, pt):
            return pt
    raise SingularPointError("No safe base point on the search spiral", steps=steps)


# -- projector and 𝕂 -----------------------------------------------------------


def _projector(f: NDArray[np.complex128]) -> CMatrix:
    norm2 = float(np.real(np.vdot(f, f)))
    return np.eye(f.size, dtype=np.complex128) - np.outer(f, np.conj(f)) / norm2


def projector(sol: CpnSolution, pt: complex) -> ProjectorSample:
    """P = 𝟙 − f⊗f†/(f†f)."""
    require_safe(sol, pt, "projector")
    return ProjectorSample(pt=complex(pt), P=_projector(sol.f(pt)))


def k_matrix(sol: CpnSolution, pt: complex) -> KSample:
    """𝕂 from the explicit f-formula."""
    require_safe(sol, pt, "k_matrix")
    return KSample(pt=complex(pt), K=k_raw(sol, pt))


def k_raw(sol: CpnSolution, pt: complex) -> CMatrix:
    """𝕂 at pt without the safety check (callers vet points or whole paths)."""
    jet = sol.jets.field(pt)
    f, df, dbf = jet.f, jet.d, jet.db
    norm2 = float(np.real(np.vdot(f, f)))
    ff = np.outer(f, np.conj(f))
    scalar = np.vdot(df, f) - np.vdot(f, dbf)
    return (np.outer(dbf, np.conj(f)) - np.outer(f, np.conj(df))) / norm2 + ff * scalar / norm2**2


def dbar_projector(sol: CpnSolution, pt: complex) -> CMatrix:
    """∂̄P from f, ∂f, ∂̄f."""
    jet = sol.jets.field(pt)
    f, df, dbf = jet.f, jet.d, jet.db
    norm2 = float(np.real(np.vdot(f, f)))
    first = (np.outer(dbf, np.conj(f)) + np.outer(f, np.conj(df))) / norm2
    second = np.outer(f, np.conj(f)) * (np.vdot(df, f) + np.vdot(f, dbf)) / norm2**2
    return -first + second


def k_matrix_commutator(sol: CpnSolution, pt: complex) -> KSample:
    """𝕂 = [∂̄P, P]."""
    require_safe(sol, pt, "k_matrix")
    P = _projector(sol.f(pt))
    dbP = dbar_projector(sol, pt)
    return KSample(pt=complex(pt), K=dbP @ P - P @ dbP)


def affine_point(sol: CpnSolution, pt: complex) -> tuple[NDArray[np.complex128], ...]:
    require_safe(sol, pt, "affine chart")
    f = sol.f(pt)
    if abs(f[0]) <= MIN_NORM * max(1.0, float(np.linalg.norm(f))):
        raise SingularPointError("Affine chart f0 = 0 at point", pt=complex(pt))
    return sol.jets.affine(pt)


def k_matrix_cp2_closed(sol: CpnSolution, pt: complex) -> KSample:
    """Closed form of 𝕂 for ℂP² in terms of W₁, W₂ and ρ.

    Raises:
        DimensionError: Unless n = 2
    """
    if sol.n != 2:
        raise DimensionError("Closed-form K needs the CP2 model", n=sol.n)
    W, dW, dbW, _ = affine_point(sol, pt)
    w1, w2 = W
    c1, c2 = np.conj(W)
    db_w1, db_w2 = dbW
    # ∂̄W̄ = conj(∂W), ∂W̄ = conj(∂̄W)
    db_c1, db_c2 = np.conj(dW)
    d_c1, d_c2 = np.conj(dbW)
    A = 1.0 + abs(w1) ** 2 + abs(w2) ** 2
    rho = c1 * dW[0] - w1 * d_c1 + c2 * dW[1] - w2 * d_c2
    M = np.array(
        [
            [0, -db_c1, -db_c2],
            [db_w1, c1 * db_w1 - w1 * db_c1, c2 * db_w1 - w1 * db_c2],
            [db_w2, c1 * db_w2 - w2 * db_c1, c2 * db_w2 - w2 * db_c2],
        ],
        dtype=np.complex128,
    )
    outer = np.array(
        [
            [1, c1, c2],
            [w1, abs(w1) ** 2, w1 * c2],
            [w2, c1 * w2, abs(w2) ** 2],
        ],
        dtype=np.complex128,
    )
    return KSample(pt=complex(pt), K=M / A + np.conj(rho) * outer / A**2)


def k_matrix_cp1_closed(sol: CpnSolution, pt: complex) -> KSample:
    """Printed ℂP¹ form of 𝕂 in terms of W; it equals −𝕂 of :func:`k_matrix`."""
    if sol.n != 1:
        raise DimensionError("Closed-form K needs the CP1 model", n=sol.n)
    W, dW, dbW, _ = affine_point(sol, pt)
    w, c = W[0], np.conj(W[0])
    db_w, db_c = dbW[0], np.conj(dW[0])
    A2 = (1.0 + abs(w) ** 2) ** 2
    K = np.array(
        [
            [c * db_w - w * db_c, db_c + c**2 * db_w],
            [-db_w - w**2 * db_c, w * db_c - c * db_w],
        ],
        dtype=np.complex128,
    )
    return KSample(pt=complex(pt), K=K / A2)


# -- residuals -----------------------------------------------------------------


def _el_vector(jet: FieldJets) -> tuple[NDArray[np.complex128], float]:
    f = jet.f
    norm2 = float(np.real(np.vdot(f, f)))
    inner = jet.ddb - (np.vdot(f, jet.db) * jet.d + np.vdot(f, jet.d) * jet.db) / norm2
    return _projector(f) @ inner, norm2


def el_residual(sol: CpnSolution, pt: complex) -> float:
    """Max-norm of P[∂∂̄f − ((f†∂̄f)∂f + (f†∂f)∂̄f)/f†f], relative to |f|."""
    require_safe(sol, pt, "el_residual")
    vec, norm2 = _el_vector(sol.jets.field(pt))
    return float(np.max(np.abs(vec)) / np.sqrt(norm2))


def affine_el_residual(sol: CpnSolution, pt: complex) -> float:
    """Residual of the affine-coordinate Euler–Lagrange equations.

    ∂∂̄Wᵢ − (1/A)Σⱼ W̄ⱼ(∂Wᵢ∂̄Wⱼ + ∂̄Wᵢ∂Wⱼ) = 0 with A = 1 + Σ|Wⱼ|²; the ℂP¹
    and ℂP² equations are its N = 1, 2 cases.
    """
    W, dW, dbW, ddbW = affine_point(sol, pt)
    A = 1.0 + float(np.sum(np.abs(W) ** 2))
    cross = np.outer(dW, dbW) + np.outer(dbW, dW)
    residual = ddbW - cross @ np.conj(W) / A
    return float(np.max(np.abs(residual)))


def conservation_residual(sol: CpnSolution, pt: complex) -> float:
    """Max-norm of ∂𝕂 − ∂̄(𝕂†).

    ∂̄(𝕂†) = (∂𝕂)†, so the law says ∂𝕂 is Hermitian. For 𝕂 = [∂̄P, P] the
    difference equals 2[∂∂̄P, P], which vanishes exactly on solutions.
    """
    require_safe(sol, pt, "conservation_residual")
    _, dK, _ = sol.jets.k(pt)
    return float(np.max(np.abs(dK - dagger(dK))))


def validation_residual(
    sol: CpnSolution, count: int = VALIDATION_POINTS, seed: int = VALIDATION_SEED
) -> float:
    """Worst EL residual over seeded random safe points."""
    if sol.is_constant:
        return 0.0
    points = sample_safe_points(sol, count, np.random.default_rng(seed))
    return max(el_residual(sol, pt) for pt in points)


# -- scalars -------------------------------------------------------------------


def j_scalars(sol: CpnSolution, pt: complex) -> JScalars:
    """J = (∂̄f)†P∂f/|f|², J̄, q = |P∂f|²/|f|² and q̃ = |P∂̄f|²/|f|²."""
    require_safe(sol, pt, "j_scalars")
    jet = sol.jets.field(pt)
    f, df, dbf = jet.f, jet.d, jet.db
    norm2 = float(np.real(np.vdot(f, f)))
    P = _projector(f)
    J = complex(np.vdot(dbf, P @ df)) / norm2
    Jbar = complex(np.vdot(df, P @ dbf)) / norm2
    q_raw = complex(np.vdot(df, P @ df)) / norm2
    qt = float(np.real(np.vdot(dbf, P @ dbf))) / norm2
    return JScalars(J=J, Jbar=Jbar, q=q_raw.real, q_tilde=qt, q_imag=q_raw.imag)


def hopf_dbar(sol: CpnSolution, pt: complex) -> complex:
    """∂̄J, zero for solutions."""
    require_safe(sol, pt, "hopf_dbar")
    J, _ = sol.jets.metric_jets(pt)
    return complex(J.db)


def action_density(sol: CpnSolution, pt: complex) -> float:
    """¼(q + q̃), the integrand of the action."""
    s = j_scalars(sol, pt)
    return 0.25 * (s.q + s.q_tilde)


def charge_density(sol: CpnSolution, pt: complex) -> float:
    """(q − q̃)/π per unit dx dy; integrates to Q over the sphere."""
    s = j_scalars(sol, pt)
    return (s.q - s.q_tilde) / np.pi


def density_field(sol: CpnSolution, which: str) -> Callable[[Any], Any]:
    """Vectorised action or charge density for quadrature.

    Raises:
        ConfigError: For an unknown density name
    """
    jets = sol.jets

    def action(z: Any) -> Any:
        q, qt = jets.densities(z)
        return 0.25 * (q + qt)

    def charge(z: Any) -> Any:
        q, qt = jets.densities(z)
        return (q - qt) / np.pi

    table = {"action": action, "charge": charge}
    if which not in table:
        raise ConfigError("Unknown density", density=which, known=sorted(table))
    return table[which]


__all__ = [
    "EXCLUSION_RADIUS",
    "CpnSolution",
    "FieldJets",
    "JScalars",
    "KSample",
    "ProjectorSample",
    "ScalarJet",
    "SolutionJets",
    "SolutionKind",
    "action_density",
    "affine_el_residual",
    "affine_point",
    "charge_density",
    "conservation_residual",
    "dbar_projector",
    "default_base_point",
    "density_field",
    "el_residual",
    "embed_cp1_in_cp2",
    "from_fields",
    "hopf_dbar",
    "invert_chart",
    "is_safe",
    "j_scalars",
    "jets_for",
    "k_matrix",
    "k_matrix_commutator",
    "k_matrix_cp1_closed",
    "k_matrix_cp2_closed",
    "k_raw",
    "make_antiholomorphic",
    "make_holomorphic",
    "make_mixed_cp2",
    "projector",
    "require_safe",
    "rotate",
    "sample_safe_points",
    "validation_residual",
    "wronskians",
]
