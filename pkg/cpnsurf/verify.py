"""Acceptance suite and the ledger of published claims.

Check rows must pass for ``cpnsurf verify`` to exit with 0. Ledger rows record
a published value next to what is measured under the conventions used here;
they never fail a run.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import structlog
import sympy as sp

from .closed_forms import (
    CP1_COORD_SCALE,
    align_affine,
    closed_form_cp1,
    closed_form_cp2_holo,
    closed_form_example2,
    closed_form_example3,
    hyperellipsoid_value,
    sphere_value,
)
from .errors import ConfigError, CpnError
from .frames import (
    complete_frame,
    cp2_frame,
    cp2_tangent_residual,
    gauss_weingarten,
    gcr_residual,
    gw_defining_residual,
)
from .geometry import (
    example1_curvature_published,
    example3_curvatures_published,
    example3_forms_published,
    gaussian_curvature,
    mean_curvature,
    metric,
    polar_forms,
    revolution_geometry,
    second_fundamental_form,
    topological_charge,
    total_action,
    willmore,
)
from .immersion import (
    ParameterGrid,
    closedness_residual,
    cp2_forms_residual,
    immerse,
    immerse_grid,
    literal_cp2_gaps,
)
from .jobs import JobConfig
from .linalg import bilinear, dagger
from .logging_config import log_operation, log_operation_complete
from .model import (
    VALIDATION_POINTS,
    VALIDATION_SEED,
    CpnSolution,
    conservation_residual,
    el_residual,
    k_matrix,
    k_matrix_commutator,
    k_matrix_cp1_closed,
    k_matrix_cp2_closed,
    make_holomorphic,
    sample_safe_points,
)
from .numerics import XI, Path, RationalFn
from .presets import PresetManager
from .settings import DEFAULT_TOLERANCES, Tolerances
from .su3 import decompose_su3, middle_factor, random_su3, recomposition_error

logger = structlog.get_logger()

REPORT_HEADER = ("name", "value", "tolerance", "passed", "reference", "kind")

EXAMPLE3_RADII = (1.2, 1.5, 2.0, 3.0)
SU3_SAMPLES = 100
PATH_PAIRS = 20
LOOPS = 10
FRAME_POINTS = 20

# acceptance groups exercised by each built-in preset
PRESET_GROUPS: dict[str, tuple[str, ...]] = {
    "cp1-sphere": ("model", "sphere", "charge"),
    "cp1-k2": ("charge",),
    "cp1-k3": ("charge",),
    "ex1": ("model", "hyperellipsoid", "example1", "paths", "frames"),
    "ex1-a0": ("example1",),
    "ex1-veronese": ("example1",),
    "ex2": ("example3",),
    "ex3": ("example3",),
    "cp1-perturbed": ("frames",),
}


@dataclass(frozen=True)
class VerificationRow:
    name: str
    value: float
    tolerance: float
    passed: bool
    reference: str
    kind: str = "check"

    def as_row(self) -> list[Any]:
        return [self.name, self.value, self.tolerance, self.passed, self.reference, self.kind]

    def to_dict(self) -> dict[str, Any]:
        return dict(zip(REPORT_HEADER, self.as_row(), strict=True))


@dataclass
class VerificationReport:
    """Ordered verification rows."""

    rows: list[VerificationRow] = field(default_factory=list)

    def check(
        self,
        name: str,
        value: float,
        tolerance: float,
        reference: str,
        above: bool = False,
    ) -> VerificationRow:
        """Record value < tolerance (or value > tolerance with ``above``)."""
        value = float(value)
        ok = bool(np.isfinite(value) and (value > tolerance if above else value < tolerance))
        row = VerificationRow(name, value, float(tolerance), ok, reference)
        self.rows.append(row)
        if not ok:
            logger.warning("Verification check failed", check=name, value=value, tolerance=tolerance)
        return row

    def ledger(self, name: str, value: float, reference: str) -> VerificationRow:
        row = VerificationRow(name, float(value), float("nan"), True, reference, kind="ledger")
        self.rows.append(row)
        return row

    def fail(self, name: str, reference: str) -> VerificationRow:
        row = VerificationRow(name, float("nan"), float("nan"), False, reference)
        self.rows.append(row)
        return row

    @property
    def checks(self) -> list[VerificationRow]:
        return [r for r in self.rows if r.kind == "check"]

    @property
    def ledger_rows(self) -> list[VerificationRow]:
        return [r for r in self.rows if r.kind == "ledger"]

    @property
    def failures(self) -> list[VerificationRow]:
        return [r for r in self.checks if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def table(self) -> list[list[Any]]:
        return [r.as_row() for r in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": len(self.checks),
            "failures": len(self.failures),
            "ledger": len(self.ledger_rows),
            "rows": [r.to_dict() for r in self.rows],
        }


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _affine_w(sol: CpnSolution, index: int) -> RationalFn:
    """Wᵢ = fᵢ/f₀ of a holomorphic solution as a rational function."""
    c = sol.components
    return RationalFn.from_expr(sp.cancel(c[index].expr(XI) / c[0].expr(XI)))


def _scalar_forms(sol: CpnSolution, pt: complex, tolerances: Tolerances) -> tuple[float, float]:
    """Ratio II/I along the unit mean-curvature normal and the worst deviation from it."""
    g = metric(sol, pt, tolerances)
    II = second_fundamental_form(sol, pt, tolerances)
    H = mean_curvature(sol, pt, tolerances)
    n = H.H_vec.mat / H.H_norm
    ii11 = II.xx + 2 * II.xxb + II.bxbx
    ii22 = -(II.xx - 2 * II.xxb + II.bxbx)
    ii12 = 1j * (II.xx - II.bxbx)
    s11, s12, s22 = (bilinear(m, n).real for m in (ii11, ii12, ii22))
    ratio = s11 / g.g11
    deviation = max(abs(s22 - ratio * g.g22), abs(s12 - ratio * g.g12))
    return abs(ratio), deviation


class VerificationSuite:
    """Runs the acceptance groups against the built-in presets."""

    GROUPS = (
        "solutions",
        "model",
        "sphere",
        "hyperellipsoid",
        "example1",
        "example3",
        "charge",
        "paths",
        "frames",
        "su3",
    )

    def __init__(
        self,
        manager: PresetManager | None = None,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
        threads: int = 1,
        seed: int = VALIDATION_SEED,
        presets: Sequence[str] | None = None,
    ):
        self.manager = manager or PresetManager()
        self.presets = list(presets) if presets else None
        self.tolerances = tolerances
        self.threads = threads
        self.seed = seed
        self._jobs: dict[tuple[str, tuple[tuple[str, Any], ...]], JobConfig] = {}

    def job(self, preset: str, **params: Any) -> JobConfig:
        key = (preset, tuple(sorted(params.items())))
        if key not in self._jobs:
            job = JobConfig.from_dict({"preset": preset, "params": params}, self.manager)
            self._jobs[key] = replace(job, tolerances=self.tolerances)
        return self._jobs[key]

    def solution(self, preset: str, **params: Any) -> CpnSolution:
        return self.job(preset, **params).solution

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @classmethod
    def groups_for(cls, presets: Sequence[str]) -> list[str]:
        """Groups touching the given presets, always starting with ``solutions``."""
        wanted = {"solutions"}
        for name in presets:
            wanted.update(PRESET_GROUPS.get(name, ()))
        return [g for g in cls.GROUPS if g in wanted]

    def run(self, groups: Sequence[str] | None = None) -> VerificationReport:
        """Run the selected groups (all by default) into one report.

        A numeric error inside a group becomes a failed row and the
        remaining groups still run.
        """
        selected = list(groups) if groups else list(self.GROUPS)
        unknown = sorted(set(selected) - set(self.GROUPS))
        if unknown:
            raise ConfigError("Unknown verification groups", groups=unknown, known=list(self.GROUPS))

        report = VerificationReport()
        ctx = log_operation(logger, "verify", groups=selected)
        for name in selected:
            method: Callable[[VerificationReport], None] = getattr(self, f"check_{name}")
            group_ctx = log_operation(logger, "verify_group", group=name)
            try:
                method(report)
            except CpnError as e:
                logger.error("Verification group raised", group=name, **e.to_dict())
                report.fail(f"{name}: {type(e).__name__}", e.message)
                log_operation_complete(logger, group_ctx, success=False, error=e.message)
                continue
            log_operation_complete(logger, group_ctx, success=True)
        log_operation_complete(
            logger, ctx, success=report.passed, checks=len(report.checks), failures=len(report.failures)
        )
        return report

    # -- groups ----------------------------------------------------------------

    def check_solutions(self, report: VerificationReport) -> None:
        """Euler-Lagrange and conservation residuals at random safe points."""
        cases = [
            ("cp1-sphere", {}),
            ("cp1-k2", {}),
            ("ex1", {"a": 0}),
            ("ex1", {"a": 1}),
            ("ex1", {"a": "sqrt(2)"}),
            ("ex2", {}),
            ("ex3", {}),
        ]
        if self.presets is not None:
            cases = [(p, {}) for p in self.presets]
        tol = self.tolerances.solution_check
        for preset, params in cases:
            job = self.job(preset, **params)
            # non-solution controls must fail both equations
            control = bool(job.options.get("control", False))
            points = sample_safe_points(job.solution, VALIDATION_POINTS, self.rng())
            label = preset + "".join(f" {k}={v}" for k, v in params.items())
            report.check(
                f"{label}: Euler-Lagrange residual",
                max(el_residual(job.solution, p) for p in points),
                tol,
                "Euler-Lagrange equations",
                above=control,
            )
            report.check(
                f"{label}: conservation residual",
                max(conservation_residual(job.solution, p) for p in points),
                tol,
                "conservation law for K",
                above=control,
            )

    def check_model(self, report: VerificationReport) -> None:
        """Both K-matrix routes agree; printed closed forms of K and dX."""
        sphere = self.solution("cp1-sphere")
        gap = np.max(np.abs(k_matrix(sphere, 0j).K - k_matrix_commutator(sphere, 0j).K))
        report.check("cp1-sphere: K formula vs commutator at 0", gap, 1e-12, "K = [dbar P, P]")

        ex1 = self.solution("ex1", a=1)
        pt = 0.5 + 0j
        gap = np.max(np.abs(k_matrix_cp2_closed(ex1, pt).K - k_matrix_commutator(ex1, pt).K))
        report.check("ex1 a=1: closed-form K vs commutator", gap, 1e-10, "CP2 closed form of K")

        pt = 0.3 + 0.2j
        closed = k_matrix_cp1_closed(sphere, pt).K
        K = k_matrix(sphere, pt).K
        report.check(
            "cp1-sphere: printed K equals minus K", np.max(np.abs(closed + K)), 1e-10, "CP1 form of K"
        )
        report.ledger(
            "cp1-sphere: printed K vs K", np.max(np.abs(closed - K)), "printed CP1 K, sign"
        )
        report.check(
            "ex1 a=1: printed CP2 one-forms assemble to dX",
            cp2_forms_residual(ex1, 0.5 + 0j),
            1e-10,
            "printed CP2 Weierstrass one-forms",
        )
        for k, gap in enumerate(literal_cp2_gaps(ex1, 0.5 + 0j), start=1):
            report.ledger(
                f"ex1 a=1: printed dX{k} read as S{k} coordinate",
                float(gap),
                "printed CP2 labels vs generators",
            )

    def check_sphere(self, report: VerificationReport) -> None:
        """ℂP¹ W = ξ: sphere identity, constant K, umbilic II and Willmore 4π."""
        job = self.job("cp1-sphere")
        sol = job.solution
        grid = ParameterGrid.from_spec({**job.grid, "n": 32})
        im = job.immersion()
        samples = immerse_grid(im, grid, self.threads)
        W = _affine_w(sol, 1)
        offset = closed_form_cp1(W, im.base_point)
        mapped = np.array([CP1_COORD_SCALE * s.coords for s in samples]) + offset
        pts = np.array([s.pt for s in samples])
        report.check(
            "cp1-sphere: integrated X vs closed form",
            np.max(np.abs(mapped - closed_form_cp1(W, pts))),
            1e-8,
            "CP1 closed-form immersion",
        )
        report.check(
            "cp1-sphere: X1^2+X2^2+(X3-1)^2 - 1",
            np.max(np.abs(sphere_value(mapped) - 1.0)),
            1e-8,
            "sphere of radius 1",
        )

        curvatures = np.array(
            [gaussian_curvature(sol, complex(p), tolerances=self.tolerances) for p in grid.points]
        )
        report.check(
            "cp1-sphere: spread of K", np.ptp(curvatures), 1e-6, "constant Gaussian curvature"
        )
        report.ledger("cp1-sphere: K (published 1)", float(np.mean(curvatures)), "sphere K = 1")

        ratios, deviations = zip(
            *(_scalar_forms(sol, p, self.tolerances) for p in sample_safe_points(sol, 8, self.rng())),
            strict=True,
        )
        report.check("cp1-sphere: II proportional to I", max(deviations), 1e-8, "II = I on the sphere")
        report.ledger("cp1-sphere: II/I (published 1)", float(np.mean(ratios)), "II = I on the sphere")

        W_value = willmore(sol, tolerances=self.tolerances, threads=self.threads).value
        report.check(
            "cp1-sphere: Willmore functional vs 4 pi",
            _relative(W_value, 4 * np.pi),
            1e-4,
            "Willmore functional",
        )
        stretched = make_holomorphic(
            1,
            [RationalFn.constant(1), W.scaled_argument(2)],
            name="cp1-sphere:scaled",
            tol=self.tolerances.solution_check,
        )
        W_scaled = willmore(stretched, tolerances=self.tolerances, threads=self.threads).value
        report.check(
            "cp1-sphere: Willmore invariance under xi -> 2 xi",
            _relative(W_scaled, W_value),
            1e-5,
            "Willmore functional",
        )

    def check_hyperellipsoid(self, report: VerificationReport) -> None:
        """ex1 (a = 1): integrated X is an affine image of the closed form."""
        job = self.job("ex1", a=1)
        sol = job.solution
        grid = ParameterGrid.from_spec({**job.grid, "n": 32})
        samples = immerse_grid(job.immersion(), grid, self.threads)
        full = np.array([s.coords for s in samples])
        closed = closed_form_cp2_holo(_affine_w(sol, 1), _affine_w(sol, 2), grid.points)
        fit = align_affine(full, closed)
        report.check("ex1 a=1: affine fit of X to closed form", fit.residual, 1e-8, "CP2 closed-form immersion")
        report.check(
            "ex1 a=1: hyperellipsoid identity",
            np.max(np.abs(hyperellipsoid_value(fit.apply(full)) - 2.0)),
            1e-8,
            "hyperellipsoid in su(3)",
        )

    def check_example1(self, report: VerificationReport) -> None:
        """K of ex1 against the printed formula and its constant cases."""
        rng = self.rng()
        worst = 0.0
        printed_gap = 0.0
        for a in rng.uniform(0.2, 2.0, size=10):
            sol = self.solution("ex1", a=float(a))
            for pt in sample_safe_points(sol, 5, rng, radius=1.5):
                K = gaussian_curvature(sol, pt, tolerances=self.tolerances)
                printed = float(example1_curvature_published(a, pt))
                worst = max(worst, abs(K + printed) / max(1.0, abs(printed)))
                printed_gap = max(printed_gap, abs(K - printed) / max(1.0, abs(printed)))
        report.check("ex1: K vs negated printed formula", worst, 1e-6, "ex1 curvature")
        report.ledger("ex1: K vs printed formula", printed_gap, "ex1 curvature, sign")

        for a, expected, printed in (("sqrt(2)", 2.0, -2.0), (0, 4.0, -4.0)):
            sol = self.solution("ex1", a=a)
            values = np.array(
                [
                    gaussian_curvature(sol, p, tolerances=self.tolerances)
                    for p in sample_safe_points(sol, 20, rng, radius=1.5)
                ]
            )
            report.check(f"ex1 a={a}: spread of K", np.ptp(values), 1e-8, "ex1 constant curvature")
            report.check(
                f"ex1 a={a}: K vs {expected:g}",
                np.max(np.abs(values - expected)),
                1e-8,
                "ex1 constant curvature",
            )
            report.ledger(f"ex1 a={a}: K (published {printed:g})", float(values.mean()), "ex1 constant curvature")

    def check_example3(self, report: VerificationReport) -> None:
        """Surface of revolution: printed forms are consistent, integrated K is 1."""
        r = np.array(EXAMPLE3_RADII)
        printed = example3_forms_published(r)
        K_printed, H_printed = example3_curvatures_published(r)
        rev = [revolution_geometry(float(x)) for x in r]

        first = max(
            max(_relative(g.E, float(e)), _relative(g.G, float(gg)))
            for g, e, gg in zip(rev, printed["I_rr"], printed["I_phiphi"], strict=True)
        )
        second = max(
            max(_relative(abs(g.L), abs(float(ll))), _relative(abs(g.N), abs(float(nn))))
            for g, ll, nn in zip(rev, printed["II_rr"], printed["II_phiphi"], strict=True)
        )
        report.check("ex3 printed: I of the printed surface", first, 1e-7, "ex3 first form")
        report.check("ex3 printed: II of the printed surface", second, 1e-7, "ex3 second form")
        report.check(
            "ex3 printed: K of the printed surface",
            max(_relative(g.K, float(k)) for g, k in zip(rev, K_printed, strict=True)),
            1e-5,
            "ex3 curvature",
        )
        report.ledger(
            "ex3 printed: mean curvature / printed H",
            float(np.mean([abs(g.H) / abs(float(h)) for g, h in zip(rev, H_printed, strict=True)])),
            "ex3 mean curvature",
        )
        at2 = EXAMPLE3_RADII.index(2.0)
        report.ledger("ex3 printed: K(2) (quoted 5.6862)", float(K_printed[at2]), "ex3 curvature at r = 2")
        report.ledger("ex3 printed: H(2) (quoted 0.62980)", float(H_printed[at2]), "ex3 curvature at r = 2")

        job = self.job("ex3")
        sol = job.solution
        pts = [complex(x * np.exp(0.3j)) for x in r]
        K_int = np.array([gaussian_curvature(sol, p, tolerances=self.tolerances) for p in pts])
        report.check("ex3: spread of integrated K", np.ptp(K_int), 1e-6, "ex3 curvature")
        report.check("ex3: integrated K vs 1", np.max(np.abs(K_int - 1.0)), 1e-6, "ex3 curvature")
        report.ledger("ex3: integrated K(2) vs printed", float(K_int[at2] - K_printed[at2]), "ex3 curvature")

        gaps = []
        for x, p in zip(r, pts, strict=True):
            forms = polar_forms(sol, float(x), 0.3, self.tolerances)
            i = EXAMPLE3_RADII.index(float(x))
            gaps.append(_relative(forms.I_rr, float(printed["I_rr"][i])))
            gaps.append(_relative(forms.I_phiphi, float(printed["I_phiphi"][i])))
        report.ledger("ex3: integrated I vs printed I", max(gaps), "ex3 first form")

        grid = ParameterGrid.from_spec({**job.grid, "n": 12})
        im = job.immersion()
        samples = immerse_grid(im, grid, self.threads)
        closed = closed_form_example3(np.abs(grid.points), np.angle(grid.points))
        fit = align_affine(np.array([s.coords for s in samples]), closed)
        report.ledger("ex3: affine fit of X to printed closed form", fit.residual, "ex3 closed form")
        report.ledger(
            "ex3: period around |xi| = 1",
            closedness_residual(im, Path.circle(0j, 2.0)),
            "loop around the singular circle",
        )

        ex2 = self.job("ex2")
        grid = ParameterGrid.from_spec({**ex2.grid, "n": 12})
        samples = immerse_grid(ex2.immersion(), grid, self.threads)
        closed = closed_form_example2(np.abs(grid.points), np.angle(grid.points))
        fit = align_affine(np.array([s.coords for s in samples]), closed)
        report.ledger("ex2: affine fit of X to printed closed form", fit.residual, "ex2 closed form")

    def check_charge(self, report: VerificationReport) -> None:
        """|Q| = k for W = ξᵏ and S = 2π|Q|."""
        for preset, k in (("cp1-sphere", 1), ("cp1-k2", 2), ("cp1-k3", 3)):
            sol = self.solution(preset)
            Q = topological_charge(sol, self.tolerances).value
            report.check(f"{preset}: |Q| - {k}", abs(abs(Q) - k), 1e-3, "topological charge")
            S = total_action(sol, self.tolerances).value
            report.check(
                f"{preset}: S vs 2 pi |Q|", _relative(S, 2 * np.pi * abs(Q)), 1e-4, "action-charge relation"
            )

    def check_paths(self, report: VerificationReport) -> None:
        """Homotopic paths agree and contractible loops integrate to zero."""
        rng = self.rng()
        im = self.job("ex1", a=1).immersion()
        worst = 0.0
        for _ in range(PATH_PAIRS):
            end, via = (complex(*rng.uniform(-1.0, 1.0, 2)) for _ in range(2))
            direct = immerse(im, end)
            bent = immerse(im, end, Path.via(im.base_point, via, end))
            worst = max(worst, float(np.max(np.abs(direct.X.mat - bent.X.mat))))
        report.check("ex1 a=1: homotopic path pairs", worst, 1e-9, "path independence")

        worst = 0.0
        for k in range(LOOPS):
            loop_im = im if k % 2 else self.job("cp1-sphere").immersion()
            center = complex(*rng.uniform(-1.0, 1.0, 2))
            loop = Path.square_loop(center, float(rng.uniform(0.1, 0.5)))
            worst = max(worst, closedness_residual(loop_im, loop))
        report.check("contractible loops", worst, 1e-9, "closedness of dX")

    def check_frames(self, report: VerificationReport) -> None:
        """Frame orthonormality, Gauss-Weingarten and Gauss-Codazzi-Ricci residuals."""
        ex1 = self.solution("ex1", a=1)
        sphere = self.solution("cp1-sphere")
        perturbed = self.solution("cp1-perturbed")
        tol = self.tolerances

        for label, sol in (("cp1-sphere", sphere), ("ex1 a=1", ex1)):
            points = sample_safe_points(sol, FRAME_POINTS, self.rng())
            frames = [complete_frame(sol, p, tolerances=tol) for p in points]
            report.check(
                f"{label}: frame orthonormality",
                max(f.residual() for f in frames),
                1e-9,
                "orthonormal frame",
            )
            report.check(
                f"{label}: Gauss-Weingarten defining property",
                max(
                    gw_defining_residual(sol, p, f, tol)
                    for p, f in zip(points, frames, strict=True)
                ),
                1e-5,
                "Gauss-Weingarten equations",
            )
            report.check(
                f"{label}: normal block antisymmetry",
                max(
                    gauss_weingarten(sol, p, f, tol).normal_antisymmetry
                    for p, f in zip(points, frames, strict=True)
                ),
                1e-8,
                "Gauss-Weingarten equations",
            )
            report.check(
                f"{label}: Gauss-Codazzi-Ricci residual",
                max(gcr_residual(sol, p, tol) for p in points),
                1e-4,
                "Gauss-Codazzi-Ricci equations",
            )
        report.check(
            "cp1-perturbed: Gauss-Codazzi-Ricci residual",
            gcr_residual(perturbed, 0.3 + 0.2j, tol),
            1e-2,
            "Gauss-Codazzi-Ricci equations",
            above=True,
        )

        line = make_holomorphic(
            2,
            [RationalFn.constant(1), RationalFn.monomial(1), RationalFn.constant(0)],
            name="cp2-line",
            tol=tol.solution_check,
        )
        Phi = cp2_frame(line, 1 + 0j, tol).Phi
        report.check(
            "cp2 W=(xi, 0): Phi unitary", np.max(np.abs(dagger(Phi) @ Phi - np.eye(3))), 1e-12, "CP2 holomorphic frame"
        )
        points = sample_safe_points(ex1, FRAME_POINTS, self.rng())
        report.check(
            "ex1 a=1: Phi tangent identities",
            max(cp2_tangent_residual(ex1, p) for p in points),
            1e-8,
            "CP2 holomorphic frame",
        )
        report.check(
            "ex1 a=1: Phi normal frame",
            max(cp2_frame(ex1, p, tol).frame.residual() for p in points),
            1e-9,
            "CP2 holomorphic frame",
        )

    def check_su3(self, report: VerificationReport) -> None:
        """Factor and recompose random special-unitary matrices."""
        rng = self.rng()
        worst = max(recomposition_error(random_su3(rng)) for _ in range(SU3_SAMPLES))
        report.check("su3: recomposition of random samples", worst, 1e-10, "SU(3) factorisation")

        mu, theta = np.exp(1j * np.pi / 4), np.pi / 6
        factors = decompose_su3(middle_factor(mu, theta))
        gap = max(abs(factors.theta - theta), abs(factors.mu - mu))
        report.check("su3: middle factor parameters", gap, 1e-10, "SU(3) factorisation")


def run_verification(
    manager: PresetManager | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    threads: int = 1,
    groups: Sequence[str] | None = None,
    presets: Sequence[str] | None = None,
) -> VerificationReport:
    """Run the suite; ``presets`` narrows it to the groups those presets touch."""
    suite = VerificationSuite(manager, tolerances, threads, presets=presets)
    if presets and not groups:
        groups = suite.groups_for(presets)
    return suite.run(groups)
