"""Tests for the induced metric, curvatures and integrals."""

import numpy as np
import pytest

from cpnsurf.errors import ConfigError, DegenerateMetricError, NotASolutionError
from cpnsurf.geometry import (
    CURVATURE_HEADER,
    curvature_from_jets,
    curvature_row,
    curvature_table,
    example1_curvature_published,
    example1_metric_published,
    example3_curvatures_published,
    example3_forms_published,
    gaussian_curvature,
    mean_curvature,
    metric,
    polar_forms,
    revolution_geometry,
    second_fundamental_form,
    signed_mean_curvature,
    topological_charge,
    total_action,
    willmore,
)
from cpnsurf.immersion import ParameterGrid
from cpnsurf.model import ScalarJet

POINTS = [0.3 + 0.2j, -0.7 + 0.1j, 1.1 - 0.6j]


class TestMetric:
    """Test the induced metric."""

    @pytest.mark.parametrize("pt", POINTS)
    def test_sphere_is_conformal(self, sphere, pt):
        """Test holomorphic solutions have J = 0 and q = 1/(1+|xi|^2)^2."""
        g = metric(sphere, pt)
        assert abs(g.J) < 1e-12
        assert g.q == pytest.approx(1.0 / (1.0 + abs(pt) ** 2) ** 2)
        assert g.q_tilde == pytest.approx(0.0, abs=1e-12)
        assert g.g_xbx == pytest.approx(0.5 * g.q)
        assert g.g11 == pytest.approx(g.g22)
        assert g.g12 == pytest.approx(0.0, abs=1e-12)
        assert not g.degenerate

    def test_sphere_at_origin(self, sphere):
        """Test g_xbx is one half of q at the origin, while g11 = g22 = q = 1."""
        g = metric(sphere, 0j)
        assert g.g_xbx == pytest.approx(0.5)
        assert g.q == pytest.approx(1.0)
        assert g.g11 == pytest.approx(1.0)
        assert g.g22 == pytest.approx(1.0)

    @pytest.mark.parametrize("pt", POINTS)
    def test_ex1_conformal_factor(self, ex1, pt):
        """Test q of f = (1, xi, xi^2) against its closed form."""
        assert metric(ex1, pt).q == pytest.approx(float(example1_metric_published(1.0, pt)))

    def test_mixed_is_not_conformal(self, mixed):
        """Test the mixed solution has both q and q_tilde."""
        g = metric(mixed, 0.6 + 0.2j)
        assert g.q > 0
        assert g.q_tilde > 0
        assert g.det_g > 0

    def test_gram_matrix(self, ex1):
        """Test the complex Gram matrix layout."""
        g = metric(ex1, 0.4j)
        gram = g.gram
        assert gram.shape == (2, 2)
        assert gram[0, 1] == gram[1, 0] == g.g_xbx
        assert "det_g" in g.to_dict()


class TestGaussianCurvature:
    """Test Gaussian curvature."""

    @pytest.mark.parametrize("method", ["auto", "conformal", "brioschi", "gauss"])
    def test_sphere_constant_curvature(self, sphere, method):
        """Test K = 4 on the CP1 sphere by every applicable route."""
        for pt in POINTS:
            assert gaussian_curvature(sphere, pt, method) == pytest.approx(4.0, rel=1e-6)

    def test_hopf_needs_nonzero_j(self, sphere):
        """Test the Hopf route refuses conformal points."""
        with pytest.raises(DegenerateMetricError):
            gaussian_curvature(sphere, 0.2, "hopf")

    def test_unknown_method(self, sphere):
        """Test an unknown method raises ConfigError."""
        with pytest.raises(ConfigError):
            gaussian_curvature(sphere, 0.2, "ricci")

    def test_veronese_curvature(self, veronese):
        """Test a = sqrt(2) has K = 2 everywhere."""
        values = [gaussian_curvature(veronese, pt) for pt in POINTS]
        assert np.allclose(values, 2.0, atol=1e-8)

    @pytest.mark.parametrize("pt", POINTS)
    def test_ex1_against_negated_formula(self, ex1, pt):
        """Test K of f = (1, xi, xi^2) equals minus the printed expression."""
        K = gaussian_curvature(ex1, pt)
        assert K == pytest.approx(-float(example1_curvature_published(1.0, pt)), rel=1e-6)

    @pytest.mark.parametrize("pt", [0.6 + 0.4j, -0.3 + 0.9j, 1.2 - 0.5j])
    def test_routes_agree_on_non_conformal_solution(self, torus, pt):
        """Test Brioschi, Hopf and the Gauss equation give K = 0 on the flat torus."""
        assert abs(metric(torus, pt).g_xx) > 0.1
        for method in ("auto", "brioschi", "hopf", "gauss"):
            assert gaussian_curvature(torus, pt, method) == pytest.approx(0.0, abs=1e-8)

    def test_jet_routes_on_curved_metric(self):
        """Test Brioschi and Hopf on g_xx = 1, g_xxb = 2 + x^2 against the closed form."""
        x = 0.5
        beta = 2.0 + x**2
        # d beta = dbar beta = x, every second Wirtinger derivative of beta = 1/2
        J = ScalarJet(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        sigma = ScalarJet(2 * beta, 2 * x, 2 * x, 1.0, 1.0, 1.0)
        D = beta**2 - 1.0
        expected = -0.5 / D + beta * x**2 / D**2
        assert expected < 0
        assert curvature_from_jets(J, sigma, "brioschi") == pytest.approx(expected, rel=1e-10)
        assert curvature_from_jets(J, sigma, "hopf") == pytest.approx(expected, rel=1e-10)

    def test_jet_routes_on_conformal_metric(self):
        """Test the conformal and Brioschi routes on the round metric of the sphere."""
        # sigma = 1/(1 + |xi|^2)^2 at xi = 0 gives K = 4
        J = ScalarJet(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        sigma = ScalarJet(1.0, 0.0, 0.0, 0.0, -2.0, 0.0)
        assert curvature_from_jets(J, sigma, "conformal") == pytest.approx(4.0)
        assert curvature_from_jets(J, sigma, "brioschi") == pytest.approx(4.0)
        with pytest.raises(ConfigError):
            curvature_from_jets(J, sigma, "gauss")

    def test_revolution_curvature_is_one(self, revolution):
        """Test the integrated surface of revolution has K = 1."""
        values = [gaussian_curvature(revolution, r * np.exp(0.3j)) for r in (1.5, 2.0, 3.0)]
        assert np.allclose(values, 1.0, atol=1e-6)


class TestMeanCurvature:
    """Test the second fundamental form and mean curvature."""

    def test_sphere_mean_curvature(self, sphere):
        """Test |H| = 2 on the sphere of radius 1/2."""
        sample = mean_curvature(sphere, 0.4 - 0.3j)
        assert sample.H_norm == pytest.approx(2.0, rel=1e-6)
        assert sample.K == pytest.approx(4.0, rel=1e-6)
        assert sample.normal_residual < 1e-8

    def test_second_form_is_normal(self, ex1):
        """Test II is orthogonal to the tangent plane."""
        assert second_fundamental_form(ex1, 0.5).normal_residual < 1e-8

    def test_signed_mean_curvature(self, ex1):
        """Test projecting H onto itself gives |H|."""
        sample = mean_curvature(ex1, 0.5)
        assert signed_mean_curvature(sample, sample.H_vec) == pytest.approx(sample.H_norm)

    def test_non_solution_refused(self, perturbed):
        """Test non-solutions have no second fundamental form."""
        with pytest.raises(NotASolutionError):
            mean_curvature(perturbed, 0.3)
        with pytest.raises(NotASolutionError):
            willmore(perturbed)


class TestPolarForms:
    """Test fundamental forms in polar coordinates."""

    def test_positive_radius(self, ex1):
        """Test r <= 0 is refused."""
        with pytest.raises(ConfigError):
            polar_forms(ex1, 0.0, 1.0)

    def test_sphere_first_form(self, sphere):
        """Test I_rphi vanishes and I_phiphi = r^2 I_rr on a conformal chart."""
        forms = polar_forms(sphere, 0.8, 0.4)
        assert forms.I_rphi == pytest.approx(0.0, abs=1e-12)
        assert forms.I_phiphi == pytest.approx(0.64 * forms.I_rr)


class TestPrintedRevolution:
    """Test the printed surface of revolution."""

    @pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
    def test_first_form(self, r):
        """Test the profile reproduces the printed first fundamental form."""
        geo = revolution_geometry(r)
        printed = example3_forms_published(r)
        assert geo.E == pytest.approx(float(printed["I_rr"]))
        assert geo.G == pytest.approx(float(printed["I_phiphi"]))

    def test_mean_curvature_at_two(self):
        """Test the printed H at r = 2."""
        _, H = example3_curvatures_published(2.0)
        assert float(H) == pytest.approx(0.62980, abs=1e-4)
        assert np.isfinite(revolution_geometry(2.0).K)

    def test_singular_radius(self):
        """Test r = 1 and r <= 0 are refused."""
        with pytest.raises(ConfigError):
            revolution_geometry(1.0)
        with pytest.raises(ConfigError):
            revolution_geometry(-2.0)


class TestIntegrals:
    """Test charge, action and the Willmore functional."""

    @pytest.mark.parametrize(("fixture", "k"), [("sphere", 1), ("sphere_k2", 2)])
    def test_charge_and_action(self, request, loose, fixture, k):
        """Test Q = k and S = 2 pi Q for W = xi^k."""
        sol = request.getfixturevalue(fixture)
        Q = topological_charge(sol, loose).value
        assert Q == pytest.approx(k, abs=1e-3)
        assert total_action(sol, loose).value == pytest.approx(2 * np.pi * k, rel=1e-3)

    def test_constant_field(self, loose):
        """Test a constant field has zero charge."""
        from cpnsurf.model import make_holomorphic
        from cpnsurf.numerics import RationalFn

        flat = make_holomorphic(1, [RationalFn.constant(1), RationalFn.constant(2)])
        assert topological_charge(flat, loose).value == 0.0
        assert willmore(flat, tolerances=loose).value == 0.0

    def test_willmore_annulus(self, sphere, loose):
        """Test the annulus integral is a fraction of the sphere's."""
        part = willmore(sphere, region=(0.0, 1.0), tolerances=loose).value
        assert part == pytest.approx(2 * np.pi, rel=1e-3)

    @pytest.mark.slow
    def test_willmore_sphere(self, sphere, loose):
        """Test the Willmore functional of the sphere is 4 pi."""
        assert willmore(sphere, tolerances=loose).value == pytest.approx(4 * np.pi, rel=1e-4)


class TestCurvatureTable:
    """Test curvature rows and tables."""

    def test_row_layout(self, ex1):
        """Test one value per header column."""
        row = curvature_row(ex1, 0.5 + 0.1j)
        assert len(row) == len(CURVATURE_HEADER)
        assert row[0] == 0.5

    def test_non_solution_has_no_mean_curvature(self, perturbed):
        """Test H is NaN for non-solutions."""
        row = curvature_row(perturbed, 0.3 + 0.2j)
        assert np.isnan(row[-1])
        assert np.isfinite(row[-2])

    def test_table_threads(self, sphere):
        """Test the table is independent of the thread count."""
        grid = ParameterGrid.polar(3, 0.1, 1.0)
        serial = curvature_table(sphere, grid)
        parallel = curvature_table(sphere, grid, threads=2)
        assert len(serial) == len(grid)
        assert np.array_equal(np.array(serial), np.array(parallel))
