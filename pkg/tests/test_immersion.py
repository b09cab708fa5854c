"""Tests for the Weierstrass immersion and parameter grids."""

import tempfile
from pathlib import Path as FsPath

import numpy as np
import pytest

from cpnsurf.closed_forms import CP1_COORD_SCALE, closed_form_cp1
from cpnsurf.emit import MeshEmitter
from cpnsurf.errors import ConfigError, DimensionError, SingularPointError
from cpnsurf.immersion import (
    Immersion,
    ParameterGrid,
    assemble_cp2_forms,
    closedness_residual,
    cp2_forms_residual,
    export_mesh,
    immerse,
    immerse_grid,
    literal_cp2_gaps,
    project_coords,
    published_cp1_forms,
    route,
    weierstrass_forms,
    weierstrass_forms_cp2,
)
from cpnsurf.linalg import SuElement, su_basis
from cpnsurf.model import make_holomorphic
from cpnsurf.numerics import Path, RationalFn


class TestImmerse:
    """Test single-point immersion."""

    def test_base_point_maps_to_base_value(self, sphere):
        """Test X(base point) is the base value."""
        im = Immersion.create(sphere)
        assert im.base_point == 0
        assert np.allclose(immerse(im, 0j).X.mat, 0.0)

    def test_custom_base_value(self, sphere):
        """Test a nonzero base value shifts X."""
        shift = su_basis(2)[2]
        im = Immersion.create(sphere, 0j, base_value=shift)
        assert np.allclose(immerse(im, 0j).X.mat, shift.mat)
        with pytest.raises(DimensionError):
            Immersion.create(sphere, 0j, base_value=SuElement.zero(3))

    @pytest.mark.parametrize("pt", [0.5 + 0.5j, -1.2 + 0.3j, 2.0 - 1.0j])
    def test_sphere_matches_closed_form(self, sphere, pt):
        """Test the integrated CP1 immersion is the rescaled closed form."""
        im = Immersion.create(sphere)
        sample = immerse(im, pt)
        mapped = CP1_COORD_SCALE * sample.coords + closed_form_cp1(RationalFn.monomial(1), 0j)
        assert np.allclose(mapped, closed_form_cp1(RationalFn.monomial(1), pt), atol=1e-8)

    def test_value_is_in_algebra(self, ex1):
        """Test X is skew-Hermitian and traceless."""
        X = immerse(Immersion.create(ex1), 0.7 - 0.2j).X.mat
        assert np.allclose(X, -X.conj().T, atol=1e-12)
        assert abs(np.trace(X)) < 1e-12

    def test_path_must_match_endpoints(self, sphere):
        """Test the path has to start at the base point."""
        im = Immersion.create(sphere)
        with pytest.raises(ConfigError):
            immerse(im, 1.0, Path.straight(0.5, 1.0))

    def test_homotopic_paths_agree(self, mixed):
        """Test a bent path gives the same X."""
        im = Immersion.create(mixed)
        direct = immerse(im, 0.8 + 0.6j)
        bent = immerse(im, 0.8 + 0.6j, Path.via(im.base_point, -0.5 + 1.0j, 0.8 + 0.6j))
        assert np.allclose(direct.X.mat, bent.X.mat, atol=1e-9)

    def test_base_point_must_be_safe(self, revolution):
        """Test a base point on the singular circle is refused."""
        with pytest.raises(SingularPointError):
            Immersion.create(revolution, 1.0)

    def test_revolution_base_point(self, revolution):
        """Test the revolution solution integrates outside the unit circle."""
        im = Immersion.create(revolution, 2.0)
        sample = immerse(im, 2.5 + 0.5j)
        assert sample.coords.shape == (8,)
        with pytest.raises(SingularPointError):
            immerse(im, 0.5)


class TestClosedness:
    """Test the closedness of dX."""

    def test_contractible_loop(self, ex1):
        """Test a square loop integrates to zero."""
        im = Immersion.create(ex1)
        assert closedness_residual(im, Path.square_loop(0.3 + 0.1j, 0.4)) < 1e-9

    def test_open_loop(self, ex1):
        """Test an open path is refused."""
        with pytest.raises(ConfigError):
            closedness_residual(Immersion.create(ex1), Path.straight(0, 1))

    def test_loop_around_singular_circle(self, revolution):
        """Test the period around |xi| = 1 is finite."""
        im = Immersion.create(revolution, 2.0)
        assert np.isfinite(closedness_residual(im, Path.circle(0j, 2.0)))


class TestRoute:
    """Test routing from the base point."""

    def test_straight_from_origin(self):
        """Test paths from the origin are straight."""
        assert route(0j, 1 + 1j).points == (0j, 1 + 1j)

    def test_arc_then_radial(self):
        """Test the route follows the circle and then the ray."""
        path = route(1.0, 2j)
        assert path.start == 1.0
        assert path.end == 2j
        radii = [abs(p) for p in path.points[:-1]]
        assert np.allclose(radii, 1.0)


class TestForms:
    """Test coordinate one-forms."""

    def test_weierstrass_forms_shape(self, ex1, sphere):
        """Test one row per basis element and two columns."""
        assert weierstrass_forms(ex1, 0.2j).shape == (8, 2)
        assert weierstrass_forms(sphere, 0.2j).shape == (3, 2)

    def test_forms_are_conjugate(self, mixed):
        """Test the dxib coefficient is the conjugate of the dxi one."""
        forms = weierstrass_forms(mixed, 0.4 + 0.1j)
        assert np.allclose(forms[:, 1], np.conj(forms[:, 0]), atol=1e-12)

    def test_cp2_forms_need_cp2(self, sphere):
        """Test the S1..S8 forms refuse CP1."""
        with pytest.raises(DimensionError):
            weierstrass_forms_cp2(sphere, 0.1)

    def test_printed_forms_shapes(self, sphere, ex1):
        """Test printed forms and their assembly."""
        assert published_cp1_forms(sphere, 0.3).shape == (3, 2)
        with pytest.raises(DimensionError):
            published_cp1_forms(ex1, 0.3)
        assert weierstrass_forms_cp2(ex1, 0.3).shape == (8, 2)
        dxi, dxib = assemble_cp2_forms(np.ones((8, 2)))
        assert dxi.shape == dxib.shape == (3, 3)

    @pytest.mark.parametrize("pt", [0.5 + 0j, 0.3 - 0.7j, -1.1 + 0.4j])
    def test_printed_cp2_forms_assemble_to_dX(self, ex1, pt):
        """Test the printed CP2 forms reproduce i K^dagger dxi + i K dxib."""
        assert cp2_forms_residual(ex1, pt) < 1e-10

    def test_printed_cp2_forms_non_holomorphic(self, torus):
        """Test the assembly also holds for a non-holomorphic solution."""
        assert cp2_forms_residual(torus, 0.6 + 0.4j) < 1e-10

    def test_printed_cp2_forms_are_real(self, ex1):
        """Test each dxib coefficient is the conjugate of the dxi one."""
        forms = weierstrass_forms_cp2(ex1, 0.4 + 0.2j)
        assert np.allclose(forms[:, 1], np.conj(forms[:, 0]), atol=1e-12)

    def test_constant_solution_forms_vanish(self):
        """Test a constant solution has zero printed forms."""
        flat = make_holomorphic(
            2, [RationalFn.constant(1), RationalFn.constant(2), RationalFn.constant(3)]
        )
        assert not np.any(weierstrass_forms_cp2(flat, 0.2))

    def test_printed_labels_are_not_generators(self, ex1):
        """Test reading printed label k as the S_k coordinate does not reproduce dX."""
        gaps = literal_cp2_gaps(ex1, 0.5)
        assert gaps.shape == (8,)
        assert gaps.max() > 1e-2


class TestParameterGrid:
    """Test parameter grids."""

    def test_polar(self):
        """Test vertex, face and line counts of a polar grid."""
        grid = ParameterGrid.polar(5, 0.5, 2.0, n_phi=8)
        assert len(grid) == 40
        assert len(grid.faces) == 8 * 4
        assert len(grid.lines) == 8
        assert grid.to_dict()["kind"] == "polar"

    def test_disk_and_both(self):
        """Test the disk and two-chart grids."""
        disk = ParameterGrid.disk(4, 1.5)
        assert disk.kind == "disk"
        assert np.max(np.abs(disk.points)) == pytest.approx(1.5)
        both = ParameterGrid.both(4, r_far=8.0)
        assert np.max(np.abs(both.points)) == pytest.approx(8.0)
        with pytest.raises(ConfigError):
            ParameterGrid.both(4, r_far=0.5)

    def test_rect(self):
        """Test the rectangular grid."""
        grid = ParameterGrid.rect(3, (-1.0, 1.0), (0.0, 2.0))
        assert len(grid) == 9
        assert len(grid.faces) == 4

    def test_from_spec(self):
        """Test job-file grid sections."""
        grid = ParameterGrid.from_spec({"chart": "polar", "n": 6, "r_min": 0.0, "r_max": 1.0})
        assert grid.shape == (6, 6)
        with pytest.raises(ConfigError):
            ParameterGrid.from_spec({"chart": "hyperbolic"})

    def test_bad_polar(self):
        """Test reversed radii are refused."""
        with pytest.raises(ConfigError):
            ParameterGrid.polar(4, 2.0, 1.0)


class TestImmerseGrid:
    """Test grid immersion and mesh export."""

    def setup_method(self):
        """Set up test environment."""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.output_dir = FsPath(self.temp_dir.name)

    def teardown_method(self):
        """Clean up test environment."""
        self.temp_dir.cleanup()

    def test_thread_count_does_not_change_result(self, ex1):
        """Test single- and multi-threaded marching agree exactly."""
        im = Immersion.create(ex1)
        grid = ParameterGrid.polar(5, 0.0, 1.5)
        serial = immerse_grid(im, grid, threads=1)
        parallel = immerse_grid(im, grid, threads=3)
        for a, b in zip(serial, parallel, strict=True):
            assert np.array_equal(a.coords, b.coords)

    def test_grid_matches_pointwise(self, sphere):
        """Test marching along lines agrees with direct integration."""
        im = Immersion.create(sphere)
        grid = ParameterGrid.polar(4, 0.2, 1.8, n_phi=5)
        samples = immerse_grid(im, grid)
        for s in samples[::3]:
            assert np.allclose(s.X.mat, immerse(im, s.pt).X.mat, atol=1e-9)

    def test_project_coords(self):
        """Test first3, pca and padding."""
        data = np.arange(16, dtype=float).reshape(2, 8)
        assert project_coords(data).shape == (2, 3)
        assert project_coords(data, "pca").shape == (2, 3)
        assert project_coords(np.ones((4, 2))).shape == (4, 3)
        with pytest.raises(ConfigError):
            project_coords(data, "tsne")

    def test_export_mesh(self, sphere):
        """Test OBJ, PLY and CSV are written."""
        im = Immersion.create(sphere)
        grid = ParameterGrid.polar(4, 0.0, 1.0)
        summary = export_mesh(im, grid, MeshEmitter(self.output_dir), name="sphere")
        assert summary.vertices == 16
        assert {FsPath(f).suffix for f in summary.files} == {".obj", ".ply", ".csv"}
        assert (self.output_dir / "sphere.obj").exists()
        assert summary.to_dict()["faces"] == len(grid.faces)

    def test_export_unknown_format(self, sphere):
        """Test an unknown mesh format raises."""
        im = Immersion.create(sphere)
        grid = ParameterGrid.polar(3, 0.0, 1.0)
        with pytest.raises(ConfigError):
            export_mesh(im, grid, MeshEmitter(self.output_dir), formats=("stl",))
