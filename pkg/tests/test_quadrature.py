"""Tests for path integration and plane/sphere quadrature."""

import numpy as np
import pytest

from cpnsurf.errors import ConfigError, SingularPointError
from cpnsurf.numerics import (
    XI,
    XIB,
    Path,
    SingularityRegistry,
    disk_quadrature,
    integrate_form,
    map_points,
    sphere_quadrature,
    wirtinger_fd,
)
from cpnsurf.numerics.quadrature import concatenate


def _holomorphic_form(pt):
    """xi^2 dxi as a 1x1 matrix form."""
    return np.array([[pt**2]]), np.zeros((1, 1), dtype=np.complex128)


def _area_form(pt):
    """(xib dxi - xi dxib)/(2i); its loop integral is twice the enclosed area."""
    return np.array([[np.conj(pt) / 2j]]), np.array([[-pt / 2j]])


class TestPath:
    """Test path construction."""

    def test_needs_two_points(self):
        """Test a single point is not a path."""
        with pytest.raises(ConfigError):
            Path((1.0,))

    def test_non_finite(self):
        """Test infinite points are refused."""
        with pytest.raises(ConfigError):
            Path((0.0, complex("inf")))

    def test_square_loop_is_closed(self):
        """Test square loops close and have perimeter 8h."""
        loop = Path.square_loop(0.5j, 0.25)
        assert loop.is_closed
        assert loop.length == pytest.approx(2.0)

    def test_circle(self):
        """Test the polygonal circle closes."""
        circle = Path.circle(1.0, 2.0, segments=16)
        assert circle.is_closed
        assert len(circle.segments()) == 16

    def test_concat_and_reverse(self):
        """Test joining paths."""
        a = Path.straight(0, 1)
        b = Path.via(1, 1 + 1j, 2j)
        joined = concatenate([a, b])
        assert joined.points == (0, 1, 1 + 1j, 2j)
        assert joined.reversed().start == 2j
        with pytest.raises(ConfigError):
            a.concat(Path.straight(5, 6))

    def test_require_safe(self):
        """Test a path crossing a pole is refused."""
        registry = SingularityRegistry.from_exprs([1 / (XI - 0.5)])
        with pytest.raises(SingularPointError):
            Path.straight(0, 1).require_safe(registry)
        Path.straight(0, 1j).require_safe(registry)

    def test_require_safe_between_vertices(self):
        """Test a crossing between any two sample points is still caught."""
        registry = SingularityRegistry.from_exprs([1 / (1 - XI * XIB)])
        with pytest.raises(SingularPointError):
            Path.straight(2.0, 0.5).require_safe(registry)
        Path.via(2.0, 2.0 + 1j, 3.0).require_safe(registry)


class TestIntegrateForm:
    """Test adaptive path quadrature."""

    def test_holomorphic_integral(self):
        """Test int_0^{1+i} xi^2 dxi = (1+i)^3/3."""
        value = integrate_form(_holomorphic_form, Path.straight(0, 1 + 1j))
        assert value[0, 0] == pytest.approx((1 + 1j) ** 3 / 3, abs=1e-12)

    def test_path_independence(self):
        """Test a bent path gives the same exact form integral."""
        direct = integrate_form(_holomorphic_form, Path.straight(0, 1 + 1j))
        bent = integrate_form(_holomorphic_form, Path.via(0, 2, 1 + 1j))
        assert np.allclose(direct, bent, atol=1e-12)

    def test_non_exact_loop(self):
        """Test a non-closed form has a nonzero loop integral."""
        loop = Path.square_loop(0, 0.5)
        value = integrate_form(_area_form, loop)
        assert value[0, 0] == pytest.approx(2.0, abs=1e-12)

    def test_degenerate_segment(self):
        """Test repeated points contribute nothing."""
        value = integrate_form(_holomorphic_form, Path.via(0, 0, 1))
        assert value[0, 0] == pytest.approx(1 / 3, abs=1e-12)

    def test_wirtinger_fd(self):
        """Test finite-difference Wirtinger derivatives of xi^2 xib."""
        d, db = wirtinger_fd(lambda z: z**2 * np.conj(z), 0.5 + 0.5j, 1e-5)
        z = 0.5 + 0.5j
        assert d == pytest.approx(2 * z * np.conj(z), abs=1e-8)
        assert db == pytest.approx(z**2, abs=1e-8)


class TestSphereQuadrature:
    """Test quadrature over the plane and the sphere."""

    def test_sphere_area_density(self):
        """Test int 1/(1+|xi|^2)^2 dx dy = pi."""
        result = sphere_quadrature(lambda z: 1.0 / (1.0 + np.abs(z) ** 2) ** 2)
        assert result.value == pytest.approx(np.pi, rel=1e-6)
        assert result.levels >= 2
        assert len(result.history) == result.levels

    def test_outer_density(self):
        """Test an explicit inverted-chart density gives the same value."""
        density = lambda z: 1.0 / (1.0 + np.abs(z) ** 2) ** 2  # noqa: E731
        result = sphere_quadrature(density, outer_density=density)
        assert result.value == pytest.approx(np.pi, rel=1e-6)

    def test_per_point_density_with_threads(self):
        """Test scalar densities are mapped point by point."""
        result = sphere_quadrature(
            lambda z: 1.0 / (1.0 + abs(z) ** 2) ** 2, tol=1e-5, vectorized=False, threads=2
        )
        assert result.value == pytest.approx(np.pi, rel=1e-5)

    def test_disk_area(self):
        """Test the area of an annulus."""
        result = disk_quadrature(lambda z: np.ones(np.shape(z)), 1.0, 2.0)
        assert result.value == pytest.approx(3 * np.pi, rel=1e-10)

    def test_disk_bad_radii(self):
        """Test unordered radii raise."""
        with pytest.raises(ConfigError):
            disk_quadrature(lambda z: z, 2.0, 1.0)

    def test_map_points_preserves_order(self):
        """Test threaded mapping keeps the input order and shape."""
        pts = np.arange(12).reshape(3, 4) * (1 + 1j)
        out = map_points(lambda p: p.real, pts, threads=3)
        assert out.shape == (3, 4)
        assert np.allclose(out, np.arange(12).reshape(3, 4))

    def test_result_to_dict(self):
        """Test the convergence record is serialisable."""
        result = disk_quadrature(lambda z: np.abs(z) ** 2, 0.0, 1.0)
        data = result.to_dict()
        assert data["value"] == pytest.approx(np.pi / 2)
        assert data["levels"] == result.levels
